import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohnet.beamforming import run_rt
from cohnet.gain import (SignalParams, StreamAssignment, beta, beta_all, coherent_gain, interference,
                         objective, period_energy_numeric, rho, sir_gain, sir_report, triangle_bound,
                         upper_bound)
from cohnet.scenario import ChannelMatrix, wrap_phase

from conftest import random_channels, scenario_channels


def cos_sin_beta(ch, theta, amps, m, subset):
    """Reference: the two squared trig sums, term by term."""
    c = sum(amps[n] * ch.gains[n, m] * math.cos(theta[n] + ch.phases[n, m]) for n in subset)
    s = sum(amps[n] * ch.gains[n, m] * math.sin(theta[n] + ch.phases[n, m]) for n in subset)
    return c * c + s * s


def instance(seed, n, m):
    r = np.random.default_rng(seed)
    return random_channels(r, n, m), r.uniform(0, 2 * np.pi, n), r.uniform(0.5, 2.0, n)


class TestBeta:
    def test_single_transmitter(self):
        ch = ChannelMatrix([[0.3]], [[1.1]])
        for th in (0.0, 1.0, 4.0):
            assert beta(ch, [th], m=0) == 0.3**2

    def test_constructive(self):
        ch = ChannelMatrix(np.ones((2, 1)), [[0.4], [1.0]])
        assert beta(ch, [0.6, 0.0], m=0) == pytest.approx(4.0, rel=1e-15)

    def test_destructive(self):
        ch = ChannelMatrix(np.ones((2, 1)), [[0.0], [0.0]])
        assert beta(ch, [0.0, math.pi], m=0) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_cos_sin_form(self, seed):
        ch, th, A = instance(seed, 5, 4)
        for m in range(4):
            assert beta(ch, th, A, m) == pytest.approx(cos_sin_beta(ch, th, A, m, range(5)), rel=1e-12)
            assert beta(ch, th, A, m, [1, 3]) == pytest.approx(cos_sin_beta(ch, th, A, m, [1, 3]), rel=1e-12)

    def test_index_errors(self):
        ch, th, _ = instance(0, 2, 2)
        with pytest.raises(IndexError):
            beta(ch, th, m=2)
        with pytest.raises(IndexError):
            beta(ch, th, m=0, subset=[5])


class TestCoherentGain:
    def test_point_to_point(self):
        ch = ChannelMatrix([[0.017]], [[2.0]])
        for th in (0.0, 3.0):
            assert coherent_gain(ch, [th]).gain == 1.0

    @pytest.mark.parametrize("n,m", [(1, 1), (3, 1), (3, 10), (10, 10)])
    def test_equal_gains_full_coherence_hits_bound(self, n, m):
        # separable phases -> one phase vector is coherent at every receiver
        r = np.random.default_rng(n * m)
        f, g = r.uniform(0, 2 * np.pi, n), r.uniform(0, 2 * np.pi, m)
        ch = ChannelMatrix(np.full((n, m), 0.01), wrap_phase(f[:, None] + g[None, :]))
        rep = coherent_gain(ch, wrap_phase(-f))
        assert rep.gain == pytest.approx(n * n * m, rel=1e-12)
        assert rep.upper_bound == n * n * m

    def test_report_fields(self):
        ch, th, A = instance(3, 4, 3)
        rep = coherent_gain(ch, th, A)
        assert rep.gain == pytest.approx(rep.per_receiver_beta.sum() / (A[0] * ch.gains[0, 0]) ** 2, rel=1e-14)
        assert np.all(rep.per_receiver_beta >= 0)

    def test_miso_mean_near_bound(self):
        # (3, 1) optimum sits just under N**2 on average; per-draw spread is about 0.04
        gains = []
        for s in range(50):
            _, ch = scenario_channels(s, 3, 1)
            gains.append(coherent_gain(ch, run_rt(ch, 0)).gain)
        assert np.mean(gains) == pytest.approx(8.98, abs=0.05)


class TestUpperBound:
    @pytest.mark.parametrize("n,m,ub", [(1, 1, 1), (3, 10, 90), (10, 10, 1000)])
    def test_values(self, n, m, ub):
        assert upper_bound(n, m) == ub

    def test_rejects(self):
        with pytest.raises(ValueError):
            upper_bound(0, 1)


class TestEnergyOracle:
    def test_single_sine(self):
        ch = ChannelMatrix([[1.0]], [[0.3]])
        assert period_energy_numeric(ch, [0.0], SignalParams(1.0, 1.0)) == pytest.approx(0.5, abs=1e-6)

    def test_two_aligned(self):
        ch = ChannelMatrix(np.ones((2, 1)), [[0.0], [0.0]])
        assert period_energy_numeric(ch, [0.0, 0.0], SignalParams(1.0, 1.0)) == pytest.approx(2.0, abs=1e-6)

    @pytest.mark.parametrize("seed", range(10))
    def test_closed_form(self, seed):
        r = np.random.default_rng(seed)
        ch = random_channels(r, 3, 1)
        th = r.uniform(0, 2 * np.pi, 3)
        sig = SignalParams(r.uniform(0.5, 3.0), r.uniform(1e-3, 10.0))
        expected = sig.amplitude**2 * sig.period / 2 * beta(ch, th, m=0)
        assert period_energy_numeric(ch, th, sig, 0) == pytest.approx(expected, rel=1e-6)

    def test_converges_with_steps(self):
        ch, th, _ = instance(9, 4, 2)
        target = 0.5 * beta(ch, th, m=1)
        errs = [abs(period_energy_numeric(ch, th, SignalParams(), 1, s) - target) for s in (1000, 4000)]
        assert errs[1] <= errs[0] + 1e-15
        assert errs[1] < 1e-9

    def test_rejects_few_steps(self):
        ch, th, _ = instance(0, 2, 2)
        with pytest.raises(ValueError):
            period_energy_numeric(ch, th, steps=10)


class TestInvariants:
    @given(seed=st.integers(0, 10**6), c=st.floats(-20, 20))
    @settings(max_examples=50)
    def test_global_phase_invariance(self, seed, c):
        ch, th, A = instance(seed, 5, 4)
        g0 = coherent_gain(ch, th, A).gain
        g1 = coherent_gain(ch, wrap_phase(th + c), A).gain
        assert g1 == pytest.approx(g0, rel=1e-12)

    @given(seed=st.integers(0, 10**6))
    @settings(max_examples=50)
    def test_receiver_offset_invariance(self, seed):
        ch, th, A = instance(seed, 5, 4)
        offs = np.random.default_rng(seed + 1).uniform(0, 2 * np.pi, 4)
        shifted = ChannelMatrix(ch.gains, wrap_phase(ch.phases + offs[None, :]))
        a = StreamAssignment((0, 1), (0, 1), ((0, 2, 4), (1, 3)), ((0, 2), (1, 3)))
        assert coherent_gain(shifted, th, A).gain == pytest.approx(coherent_gain(ch, th, A).gain, rel=1e-12)
        for k in (0, 1):
            assert rho(shifted, th, a, k, A) == pytest.approx(rho(ch, th, a, k, A), rel=1e-12)
            assert sir_gain(shifted, th, a, k, A) == pytest.approx(sir_gain(ch, th, a, k, A), rel=1e-12)

    @given(seed=st.integers(0, 10**6))
    @settings(max_examples=100)
    def test_triangle_bound(self, seed):
        ch, th, A = instance(seed, 6, 3)
        assert coherent_gain(ch, th, A).gain <= triangle_bound(ch, A) * (1 + 1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_miso_closed_form(self, seed):
        ch, _, A = instance(seed, 6, 1)
        # per-transmitter phase that cancels the channel phase
        th = wrap_phase(-ch.phases[:, 0])
        expected = (A * ch.gains[:, 0]).sum() ** 2 / (A[0] * ch.gains[0, 0]) ** 2
        assert coherent_gain(ch, th, A).gain == pytest.approx(expected, rel=1e-12)


def energy_ratio_gain(ch, th, A, T_sets, R_sets, src, dst, k, T=2.0):
    """SIR gain from per-period energies and the two SIRs, built from scratch."""
    K = len(src)
    sig = 0.0
    for m in R_sets[k]:
        c = sum(A[n] * ch.gains[n, m] * math.cos(th[n] + ch.phases[n, m]) for n in T_sets[k])
        s = sum(A[n] * ch.gains[n, m] * math.sin(th[n] + ch.phases[n, m]) for n in T_sets[k])
        sig += T / 2 * (c * c + s * s)
    interf = 0.0
    for m in R_sets[k]:
        for l in range(K):
            if l != k:
                for n in T_sets[l]:
                    interf += (A[n] * ch.gains[n, m]) ** 2 / 2 * T
    sir_coherent = sig / interf
    p2p_sig = (A[src[k]] * ch.gains[src[k], dst[k]]) ** 2 / 2 * T
    p2p_int = sum((A[src[l]] * ch.gains[src[l], dst[k]]) ** 2 / 2 * T for l in range(K) if l != k)
    return sir_coherent / (p2p_sig / p2p_int)


class TestStreams:
    def test_assignment_invariants(self):
        with pytest.raises(ValueError):
            StreamAssignment((0, 1), (0, 1), ((0,), (0, 1)), ((0,), (1,)))  # overlap
        with pytest.raises(ValueError):
            StreamAssignment((0, 1), (0, 1), ((2,), (1,)), ((0,), (1,)))  # source missing
        with pytest.raises(ValueError):
            StreamAssignment((0,), (0, 1), ((0,),), ((0,),))

    def test_rho_single_link(self):
        ch, th, A = instance(1, 3, 3)
        a = StreamAssignment((0, 1), (2, 0), ((0,), (1,)), ((2,), (0,)))
        assert rho(ch, th, a, 0, A) == (A[0] * ch.gains[0, 2]) ** 2

    def test_rho_reduces_to_power_gain_numerator(self):
        ch, th, A = instance(2, 4, 3)
        a = StreamAssignment((0,), (0,), ((0, 1, 2, 3),), ((0, 1, 2),))
        assert rho(ch, th, a, 0, A) == pytest.approx(coherent_gain(ch, th, A).per_receiver_beta.sum(), rel=1e-14)

    @pytest.mark.parametrize("seed", range(10))
    def test_rho_term_by_term(self, seed):
        ch, th, A = instance(seed, 6, 5)
        a = StreamAssignment((0, 1), (0, 1), ((0, 3, 5), (1, 2, 4)), ((0, 4), (1, 2, 3)))
        for k in range(2):
            direct = sum(cos_sin_beta(ch, th, A, m, a.tx_sets[k]) for m in a.rx_sets[k])
            assert rho(ch, th, a, k, A) == pytest.approx(direct, rel=1e-12)

    def test_rho_rejects_empty(self):
        ch, th, _ = instance(0, 2, 2)
        a = StreamAssignment((0,), (0,), ((0,),), ((0,),))
        with pytest.raises(IndexError):
            rho(ch, th, a, 1)

    def test_singletons_give_unit_gain_exactly(self):
        for seed in range(20):
            ch, th, A = instance(seed, 4, 4)
            a = StreamAssignment((0, 1, 2), (0, 1, 2), ((0,), (1,), (2,)), ((0,), (1,), (2,)))
            for k in range(3):
                assert sir_gain(ch, th, a, k, A) == 1.0

    @given(seed=st.integers(0, 10**6), c=st.floats(0.01, 100.0))
    @settings(max_examples=40)
    def test_common_amplitude_scale_cancels(self, seed, c):
        ch, th, A = instance(seed, 4, 4)
        a = StreamAssignment((0, 1), (0, 1), ((0, 2), (1, 3)), ((0, 3), (1, 2)))
        for k in range(2):
            assert sir_gain(ch, th, a, k, A * c) == pytest.approx(sir_gain(ch, th, a, k, A), rel=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_against_energy_ratio_oracle(self, seed):
        ch, th, A = instance(seed, 4, 4)
        rr = np.random.default_rng(seed)
        tx_lab = np.r_[0, 1, rr.integers(0, 2, 2)]
        rx_lab = np.r_[0, 1, rr.integers(0, 2, 2)]
        a = StreamAssignment.from_labels(tx_lab, rx_lab, (0, 1), (0, 1))
        for k in range(2):
            ref = energy_ratio_gain(ch, th, A, a.tx_sets, a.rx_sets, a.sources, a.destinations, k)
            assert sir_gain(ch, th, a, k, A) == pytest.approx(ref, rel=1e-12)

    def test_interference_is_phase_free(self):
        ch, th, A = instance(5, 5, 4)
        a = StreamAssignment((0, 1), (0, 1), ((0, 2), (1, 3, 4)), ((0, 2), (1, 3)))
        before = [interference(ch, a, k, A) for k in range(2)]
        for n in range(5):
            th2 = th.copy()
            th2[n] += 1.234
            assert [interference(ch, a, k, A) for k in range(2)] == before

    def test_single_stream_rejected(self):
        ch, th, _ = instance(0, 2, 2)
        a = StreamAssignment((0,), (0,), ((0, 1),), ((0, 1),))
        with pytest.raises(ValueError):
            sir_gain(ch, th, a, 0)


class TestObjective:
    def test_values(self):
        assert objective([2.5, 8.0]) == 2.5
        assert objective([7.0]) == 7.0
        assert objective([2.0, 4.0], "mean") == 3.0

    def test_rejects(self):
        with pytest.raises(ValueError):
            objective([])
        with pytest.raises(ValueError):
            objective([1.0], "max")

    def test_report_is_min_of_streams(self):
        _, ch = scenario_channels(4, 10, 10, model="free_space", r=100.0, k=2)
        th = np.random.default_rng(0).uniform(0, 2 * np.pi, 10)
        a = StreamAssignment.from_labels([0, 1, 0, 1, 0, 1, 0, 1, 0, 1], [0, 1, 1, 0, 0, 1, 1, 0, 0, 1], (0, 1), (0, 1))
        rep = sir_report(ch, th, a)
        assert rep.objective == min(sir_gain(ch, th, a, 0), sir_gain(ch, th, a, 1))
        assert np.all(rep.rho >= 0)

"""Doppler tolerance, training overhead and the coherent vs point-to-point rate model.

Level conventions: ``transmit_power``, ``received_power`` and
``noise_floor_density`` are dBm (or dBm/Hz); ``noise_figure``, SNRs and
processing gains are dB.

The rate comparison is a declared model, not data taken from any measurement:
Shannon capacity with an ``N**3`` SNR multiplier for the coherent link, cut by
the share of each coherence interval spent on overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class LinkBudgetParams:
    transmit_power: float = 10.0  # dBm
    noise_figure: float = 3.0  # dB
    noise_floor_density: float = -174.0  # dBm/Hz
    bandwidth: float = 1e6  # Hz
    center_frequency: float = 2.4e9  # Hz
    light_speed: float = 3e8  # m/s
    train_snr: float = 20.0  # dB
    feedback_snr: float = 10.0  # dB
    bits_per_estimate: int = 16
    header_bits: int = 10
    overhead_fraction: float = 0.1
    group_size: int = 10

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be > 0")
        if not self.center_frequency > 0:
            raise ValueError("center_frequency must be > 0")
        if not 0 < self.overhead_fraction <= 1:
            raise ValueError("overhead_fraction must lie in (0, 1]")
        if self.group_size < 1:
            raise ValueError("group_size must be >= 1")


@dataclass(frozen=True)
class DopplerReport:
    wavelength: float
    received_power: float
    snr: float
    train_gain: float
    feedback_gain: float
    train_bits: float
    feedback_bits: float
    overhead_bits: float
    overhead_time: float
    coherence_time: float
    doppler_spread: float


@dataclass(frozen=True)
class OverheadParams:
    training_time: float = 6e-3  # s, per transmitter
    guard_time: float = 1e-3  # s, per transmitter

    def __post_init__(self):
        if self.training_time < 0 or self.guard_time < 0:
            raise ValueError("training and guard times must be >= 0")


@dataclass(frozen=True)
class RateResult:
    distance: float
    coherent_rate: float
    p2p_rate: float
    overhead_share: float
    infeasible: bool  # overhead fills the whole coherence interval


def received_snr_db(params: LinkBudgetParams, distance: float) -> tuple[float, float, float]:
    """Free-space ``(wavelength, P_r [dBm], SNR [dB])`` at ``distance``."""
    if not distance > 0:
        raise ValueError("distance must be > 0")
    lam = params.light_speed / params.center_frequency
    pr = params.transmit_power + 20.0 * math.log10(lam / (4.0 * math.pi * distance))
    snr = pr - 10.0 * math.log10(params.bandwidth) - params.noise_figure - params.noise_floor_density
    return lam, pr, snr


def doppler_tolerance(params: LinkBudgetParams, distance: float, rounding: str = "continuous") -> DopplerReport:
    """Tolerable Doppler spread for the training/feedback overhead at ``distance``.

    ``rounding="ceil"`` rounds the training and feedback bit counts up to
    whole bits; the default keeps them continuous.
    """
    if rounding not in ("continuous", "ceil"):
        raise ValueError(f"unknown rounding {rounding!r}")
    lam, pr, snr = received_snr_db(params, distance)
    g_t = params.train_snr - snr
    g_f = params.feedback_snr - snr
    N = params.group_size
    b_t = max(10.0 ** (g_t / 10.0), float(N))
    b_f = max(10.0 ** (g_f / 10.0), 1.0) * N * params.bits_per_estimate + params.header_bits * N
    if rounding == "ceil":
        b_t, b_f = float(math.ceil(b_t)), float(math.ceil(b_f))
    b_o = b_t + b_f
    t_o = b_o / params.bandwidth + 3.0 * distance / params.light_speed
    t_c = t_o / params.overhead_fraction
    return DopplerReport(lam, pr, snr, g_t, g_f, b_t, b_f, b_o, t_o, t_c, 1.0 / t_c)


def doppler_curve(params: LinkBudgetParams, distances) -> np.ndarray:
    return np.array([doppler_tolerance(params, d).doppler_spread for d in distances])


def training_overhead(n_transmitters: int, overhead: OverheadParams = OverheadParams()) -> float:
    """Time-multiplexed training: one slot plus guard per transmitter."""
    if n_transmitters < 1:
        raise ValueError("need at least one transmitter")
    return n_transmitters * (overhead.training_time + overhead.guard_time)


def rate_comparison(params: LinkBudgetParams, distance: float, group_size: int,
                    coherence_time: float, overhead: OverheadParams = OverheadParams()) -> RateResult:
    """Coherent-group rate vs the direct link, both in bit/s."""
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    if not coherence_time > 0:
        raise ValueError("coherence_time must be > 0")
    params = replace(params, group_size=group_size)
    snr = 10.0 ** (received_snr_db(params, distance)[2] / 10.0)
    p2p = params.bandwidth * math.log2(1.0 + snr)
    spent = doppler_tolerance(params, distance).overhead_time + training_overhead(group_size, overhead)
    share = spent / coherence_time
    if share >= 1.0:
        return RateResult(distance, 0.0, p2p, share, True)
    coherent = (1.0 - share) * params.bandwidth * math.log2(1.0 + group_size**3 * snr)
    return RateResult(distance, coherent, p2p, share, False)


def rate_curve(params: LinkBudgetParams, distances, group_size: int, coherence_time: float,
               overhead: OverheadParams = OverheadParams()) -> list[RateResult]:
    return [rate_comparison(params, d, group_size, coherence_time, overhead) for d in distances]


def crossover_distance(results: list[RateResult]) -> float | None:
    """First sampled distance where the coherent rate overtakes the direct link."""
    diff = np.array([r.coherent_rate - r.p2p_rate for r in results])
    idx = np.flatnonzero((diff[:-1] <= 0) & (diff[1:] > 0))
    return float(results[idx[0] + 1].distance) if idx.size else None

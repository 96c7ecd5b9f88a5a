"""Coherent power gain, SIR gain and the per-period energy oracle.

Per-receiver sums are evaluated in the pairwise form

    beta_m = sum_n a_nm**2 + 2 * sum_{n<n'} a_nm a_n'm cos(phi_nm - phi_n'm)

with ``a_nm = A_n h_nm`` and ``phi_nm = theta_n + theta_nm``. It is algebraically
identical to the squared modulus of the phasor sum, but a single-transmitter
sum reduces to ``a**2`` bit for bit, which keeps point-to-point baselines
exact (e.g. singleton streams give an SIR gain of exactly 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .scenario import ChannelMatrix


@dataclass(frozen=True)
class SignalParams:
    amplitude: float = 1.0
    period: float = 1.0

    def __post_init__(self):
        if not (self.amplitude > 0 and self.period > 0):
            raise ValueError("amplitude and period must be > 0")


@dataclass(frozen=True)
class GainReport:
    gain: float
    per_receiver_beta: np.ndarray
    upper_bound: int


@dataclass(frozen=True)
class StreamAssignment:
    """Disjoint per-stream transmitter/receiver groups.

    ``tx_sets[k]`` and ``rx_sets[k]`` are sorted tuples of node indices and
    always contain ``sources[k]`` and ``destinations[k]`` respectively.
    """

    sources: tuple[int, ...]
    destinations: tuple[int, ...]
    tx_sets: tuple[tuple[int, ...], ...]
    rx_sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        K = len(self.sources)
        if not (len(self.destinations) == len(self.tx_sets) == len(self.rx_sets) == K):
            raise ValueError("sources, destinations, tx_sets and rx_sets must all have length K")
        object.__setattr__(self, "tx_sets", tuple(tuple(sorted(int(i) for i in s)) for s in self.tx_sets))
        object.__setattr__(self, "rx_sets", tuple(tuple(sorted(int(i) for i in s)) for s in self.rx_sets))
        for k in range(K):
            if self.sources[k] not in self.tx_sets[k]:
                raise ValueError(f"source {self.sources[k]} missing from its transmitter set")
            if self.destinations[k] not in self.rx_sets[k]:
                raise ValueError(f"destination {self.destinations[k]} missing from its receiver set")
        for sets, what in ((self.tx_sets, "transmitter"), (self.rx_sets, "receiver")):
            flat = [i for s in sets for i in s]
            if len(flat) != len(set(flat)):
                raise ValueError(f"{what} sets are not disjoint")

    @property
    def n_streams(self) -> int:
        return len(self.sources)

    @classmethod
    def from_labels(cls, tx_labels, rx_labels, sources, destinations) -> "StreamAssignment":
        """Build from per-node stream labels (-1 = unassigned)."""
        K = len(sources)
        tx_labels = np.asarray(tx_labels)
        rx_labels = np.asarray(rx_labels)
        return cls(
            tuple(int(s) for s in sources),
            tuple(int(d) for d in destinations),
            tuple(tuple(np.flatnonzero(tx_labels == k).tolist()) for k in range(K)),
            tuple(tuple(np.flatnonzero(rx_labels == k).tolist()) for k in range(K)),
        )


@dataclass(frozen=True)
class SirReport:
    gains: np.ndarray  # G_k
    rho: np.ndarray  # coherent numerators
    objective: float


def _amps(channels: ChannelMatrix, amps) -> np.ndarray:
    if amps is None:
        return np.ones(channels.n_transmitters)
    amps = np.asarray(amps, dtype=float)
    if amps.shape != (channels.n_transmitters,):
        raise ValueError(f"expected {channels.n_transmitters} amplitudes, got shape {amps.shape}")
    if np.any(amps <= 0):
        raise ValueError("amplitudes must be > 0")
    return amps


def _phases(channels: ChannelMatrix, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (channels.n_transmitters,):
        raise ValueError(f"expected {channels.n_transmitters} phases, got shape {theta.shape}")
    return theta


def link_power(channels: ChannelMatrix, amps=None) -> np.ndarray:
    """``(A_n h_nm)**2`` for every link."""
    return np.square(_amps(channels, amps)[:, None] * channels.gains)


def beta_all(channels: ChannelMatrix, theta, amps=None, subset=None, receivers=None) -> np.ndarray:
    """``beta_m`` for every receiver in ``receivers`` (default: all)."""
    theta = _phases(channels, theta)
    amps = _amps(channels, amps)
    tx = np.arange(channels.n_transmitters) if subset is None else np.asarray(subset, dtype=int)
    rx = np.arange(channels.n_receivers) if receivers is None else np.asarray(receivers, dtype=int)
    a = amps[tx, None] * channels.gains[np.ix_(tx, rx)]
    phi = theta[tx, None] + channels.phases[np.ix_(tx, rx)]
    out = np.square(a).sum(axis=0)
    if len(tx) > 1:
        i, j = np.triu_indices(len(tx), k=1)
        out = out + 2.0 * (a[i] * a[j] * np.cos(phi[i] - phi[j])).sum(axis=0)
    # cross terms can push a destructive sum a hair below zero
    return np.maximum(out, 0.0)


def beta(channels: ChannelMatrix, theta, amps=None, m: int = 0, subset=None) -> float:
    if not 0 <= m < channels.n_receivers:
        raise IndexError(f"receiver index {m} out of range 0..{channels.n_receivers - 1}")
    if subset is not None:
        subset = list(subset)
        if any(not 0 <= n < channels.n_transmitters for n in subset):
            raise IndexError("transmitter subset index out of range")
    return float(beta_all(channels, theta, amps, subset, [m])[0])


def benchmark_power(channels: ChannelMatrix, amps=None) -> float:
    """Point-to-point received power of the transmitter 1 -> receiver 1 link."""
    amps = _amps(channels, amps)
    return float(np.square(amps[0] * channels.gains[0, 0]))


def upper_bound(n_transmitters: int, n_receivers: int) -> int:
    if n_transmitters < 1 or n_receivers < 1:
        raise ValueError("group sizes must be >= 1")
    return n_transmitters**2 * n_receivers


def coherent_gain(channels: ChannelMatrix, theta, amps=None) -> GainReport:
    bench = benchmark_power(channels, amps)
    if bench == 0:
        raise ZeroDivisionError("degenerate benchmark: zero source-destination gain")
    b = beta_all(channels, theta, amps)
    return GainReport(float(b.sum() / bench), b, upper_bound(*channels.shape))


def gain_value(channels: ChannelMatrix, theta, amps=None) -> float:
    return coherent_gain(channels, theta, amps).gain


def triangle_bound(channels: ChannelMatrix, amps=None) -> float:
    """Phase-free upper bound ``sum_m (sum_n A_n h_nm)**2 / (A_1 h_11)**2``."""
    a = _amps(channels, amps)[:, None] * channels.gains
    return float(np.square(a.sum(axis=0)).sum() / benchmark_power(channels, amps))


def period_energy_numeric(channels: ChannelMatrix, theta, signal: SignalParams = SignalParams(),
                          m: int = 0, steps: int = 4096) -> float:
    """Energy received at ``m`` over one period, by Simpson quadrature of the waveform."""
    if steps < 1000:
        raise ValueError("steps must be >= 1000")
    theta = _phases(channels, theta)
    A, T = signal.amplitude, signal.period
    t = np.linspace(0.0, T, steps + 1)
    arg = 2.0 * np.pi * t[:, None] / T + theta[None, :] + channels.phases[None, :, m]
    wave = (A * channels.gains[None, :, m] * np.sin(arg)).sum(axis=1)
    return float(integrate.simpson(wave**2, x=t))


def _check_stream(assignment: StreamAssignment, k: int):
    if not 0 <= k < assignment.n_streams:
        raise IndexError(f"stream index {k} out of range")
    if not assignment.tx_sets[k] or not assignment.rx_sets[k]:
        raise ValueError(f"stream {k} has an empty transmitter or receiver set")


def rho(channels: ChannelMatrix, theta, assignment: StreamAssignment, k: int, amps=None) -> float:
    _check_stream(assignment, k)
    return float(beta_all(channels, theta, amps, assignment.tx_sets[k], assignment.rx_sets[k]).sum())


def interference(channels: ChannelMatrix, assignment: StreamAssignment, k: int, amps=None) -> tuple[float, float]:
    """Return ``(coherent, point_to_point)`` interference power at stream ``k``.

    Neither depends on the transmit phases.
    """
    p = link_power(channels, amps)
    others = [l for l in range(assignment.n_streams) if l != k]
    rows = [n for l in others for n in assignment.tx_sets[l]]
    coh = p[np.ix_(rows, assignment.rx_sets[k])].ravel().sum() if rows else 0.0
    src = [assignment.sources[l] for l in others]
    p2p = p[src, assignment.destinations[k]].sum() if src else 0.0
    return float(coh), float(p2p)


def sir_gain(channels: ChannelMatrix, theta, assignment: StreamAssignment, k: int, amps=None) -> float:
    if assignment.n_streams < 2:
        raise ValueError("SIR gain needs at least two streams; use coherent_gain for K=1")
    _check_stream(assignment, k)
    r = rho(channels, theta, assignment, k, amps)
    coh, p2p = interference(channels, assignment, k, amps)
    signal = float(link_power(channels, amps)[assignment.sources[k], assignment.destinations[k]])
    den = signal * coh
    if den == 0:
        raise ZeroDivisionError(f"stream {k} sees no interference; SIR baseline undefined")
    return (p2p * r) / den


def objective(gains: Sequence[float], kind: str = "min") -> float:
    gains = np.asarray(gains, dtype=float)
    if gains.size == 0:
        raise ValueError("objective needs at least one stream gain")
    if kind == "min":
        return float(gains.min())
    if kind == "mean":
        return float(gains.mean())
    raise ValueError(f"unknown objective {kind!r}")


def sir_report(channels: ChannelMatrix, theta, assignment: StreamAssignment, amps=None,
               kind: str = "min") -> SirReport:
    K = assignment.n_streams
    g = np.array([sir_gain(channels, theta, assignment, k, amps) for k in range(K)])
    r = np.array([rho(channels, theta, assignment, k, amps) for k in range(K)])
    return SirReport(g, r, objective(g, kind))

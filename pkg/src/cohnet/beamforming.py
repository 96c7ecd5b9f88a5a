"""Transmit-phase selection protocols.

Every protocol returns a full-length phase vector in ``[0, 2*pi)``. Protocols
accept an optional ``scope=(transmitters, receivers)``; transmitters outside
the scope keep phase 0 and receivers outside it are ignored. Joint
formation/beamforming runs one scoped protocol per stream.
"""

from __future__ import annotations

import enum
import itertools

import numpy as np

from .gain import _amps, beta_all
from .scenario import TWO_PI, ChannelMatrix, wrap_phase


class BeamPolicy(str, enum.Enum):
    RB = "RB"
    RT = "RT"
    BT = "BT"
    SF = "SF"
    IO = "IO"
    ES = "ES"


DEFAULT_ES_STEP = TWO_PI / 360
DEFAULT_ES_CAP = 3


class ComplexityError(RuntimeError):
    """Raised when an exhaustive search would exceed its configured cap."""


def _scope(channels: ChannelMatrix, scope):
    if scope is None:
        return list(range(channels.n_transmitters)), list(range(channels.n_receivers))
    tx, rx = scope
    return [int(n) for n in tx], [int(m) for m in rx]


def scoped_power(channels: ChannelMatrix, theta, amps=None, scope=None) -> float:
    """Sum of ``beta_m`` over the scope's receivers, using only its transmitters."""
    tx, rx = _scope(channels, scope)
    return float(beta_all(channels, theta, amps, tx, rx).sum())


def optimize_single_phase(channels: ChannelMatrix, theta, amps=None, n: int = 0, scope=None) -> float:
    """Best phase for transmitter ``n`` with every other phase held fixed.

    The scoped power is ``const + 2 Re(exp(1j*theta_n) * Z)`` with
    ``Z = sum_m a_nm * conj(C_m)``, ``a_nm = A_n h_nm exp(1j*theta_nm)`` and
    ``C_m`` the phasor sum of the other in-scope transmitters, so the optimum
    is ``-angle(Z)``. When ``Z`` vanishes (up to rounding, relative to the
    magnitudes involved) the power does not depend on ``theta_n`` and 0 is
    returned. If the closed form does not beat the current phase in
    floating point, the current phase is kept so the power never drops.
    """
    tx, rx = _scope(channels, scope)
    if n not in tx:
        raise ValueError(f"transmitter {n} is not in scope")
    theta = np.asarray(theta, dtype=float)
    A = _amps(channels, amps)
    a = A[:, None] * channels.gains * np.exp(1j * channels.phases)
    others = [i for i in tx if i != n]
    C = (a[np.ix_(others, rx)] * np.exp(1j * theta[others])[:, None]).sum(axis=0)
    Z = np.sum(a[n, rx] * np.conj(C))
    if abs(Z) <= 1e-12 * np.sum(np.abs(a[n, rx]) * np.abs(C)):
        return 0.0
    best = wrap_phase(-np.angle(Z))
    trial = theta.copy()
    trial[n] = best
    if scoped_power(channels, trial, A, (tx, rx)) >= scoped_power(channels, theta, A, (tx, rx)):
        return best
    return wrap_phase(theta[n])


def run_rb(channels: ChannelMatrix, rng: np.random.Generator, scope=None) -> np.ndarray:
    tx, _ = _scope(channels, scope)
    theta = np.zeros(channels.n_transmitters)
    theta[tx] = rng.uniform(0.0, TWO_PI, len(tx))
    return wrap_phase(theta)


def run_rt(channels: ChannelMatrix, target: int, scope=None) -> np.ndarray:
    """Phase coherence at receiver ``target``; the first scoped transmitter is the reference."""
    tx, rx = _scope(channels, scope)
    if target not in rx:
        raise ValueError(f"target receiver {target} is not in scope")
    ref = tx[0]
    theta = np.zeros(channels.n_transmitters)
    for n in tx[1:]:
        theta[n] = channels.phases[ref, target] - channels.phases[n, target]
    return wrap_phase(theta)


def run_rt_random(channels: ChannelMatrix, rng: np.random.Generator, scope=None) -> np.ndarray:
    _, rx = _scope(channels, scope)
    target = rx[int(rng.integers(len(rx)))]
    return run_rt(channels, target, scope)


def run_bt(channels: ChannelMatrix, amps=None, scope=None) -> np.ndarray:
    """RT towards the receiver whose coherence gives the largest total scoped power."""
    tx, rx = _scope(channels, scope)
    best, best_val = None, -np.inf
    for m in rx:
        theta = run_rt(channels, m, (tx, rx))
        val = scoped_power(channels, theta, amps, (tx, rx))
        if val > best_val:
            best, best_val = theta, val
    return best


def _sort_transmitters(channels: ChannelMatrix, amps, tx, rx) -> list[int]:
    # descending received energy; python's sort is stable so ties keep index order
    p = np.square(_amps(channels, amps)[:, None] * channels.gains)
    strength = {n: p[n, rx].sum() for n in tx}
    return sorted(tx, key=lambda n: -strength[n])


def run_sf(channels: ChannelMatrix, amps=None, scope=None) -> np.ndarray:
    tx, rx = _scope(channels, scope)
    order = _sort_transmitters(channels, amps, tx, rx)
    theta = np.zeros(channels.n_transmitters)
    for i in range(1, len(order)):
        n = order[i]
        theta[n] = optimize_single_phase(channels, theta, amps, n, (order[: i + 1], rx))
    return wrap_phase(theta)


def run_io(channels: ChannelMatrix, amps=None, max_sweeps: int = 100, tol: float = 1e-9,
           scope=None) -> np.ndarray:
    """SF followed by coordinate-ascent sweeps until a sweep gains at most ``tol`` (relative)."""
    if max_sweeps < 1 or not tol > 0:
        raise ValueError("need max_sweeps >= 1 and tol > 0")
    tx, rx = _scope(channels, scope)
    order = _sort_transmitters(channels, amps, tx, rx)
    theta = run_sf(channels, amps, (tx, rx))
    value = scoped_power(channels, theta, amps, (tx, rx))
    for _ in range(max_sweeps):
        for n in order:
            theta[n] = optimize_single_phase(channels, theta, amps, n, (tx, rx))
        new = scoped_power(channels, theta, amps, (tx, rx))
        improved = new - value > tol * value
        value = new
        if not improved:
            break
    return wrap_phase(theta)


def run_es(channels: ChannelMatrix, amps=None, grid_step: float = DEFAULT_ES_STEP,
           cap: int = DEFAULT_ES_CAP, scope=None) -> np.ndarray:
    """Grid search over the phases of all but the first scoped transmitter.

    Ties go to the lexicographically smallest grid point.
    """
    if not grid_step > 0:
        raise ValueError("grid_step must be > 0")
    tx, rx = _scope(channels, scope)
    if len(tx) > cap:
        raise ComplexityError(f"exhaustive search over {len(tx)} transmitters exceeds cap {cap}")
    theta = np.zeros(channels.n_transmitters)
    if len(tx) == 1:
        return theta
    A = _amps(channels, amps)
    a = A[tx, None] * channels.gains[np.ix_(tx, rx)] * np.exp(1j * channels.phases[np.ix_(tx, rx)])
    grid = np.arange(0.0, TWO_PI, grid_step)
    rot = np.exp(1j * grid)[:, None]
    last = rot * a[-1][None, :]  # (G, M)
    best_val, best_pt = -np.inf, None
    # outer loop in ascending order plus first-max argmax keeps lexicographic ties
    for idx in itertools.product(range(len(grid)), repeat=len(tx) - 2):
        base = a[0].copy()
        for j, g in enumerate(idx, start=1):
            base = base + rot[g, 0] * a[j]
        vals = np.square(np.abs(base[None, :] + last)).sum(axis=1)
        g_last = int(np.argmax(vals))
        if vals[g_last] > best_val:
            best_val, best_pt = vals[g_last], idx + (g_last,)
    theta[tx[1:]] = grid[list(best_pt)]
    return theta


def run_policy(policy, channels: ChannelMatrix, amps=None, rng=None, scope=None, *,
               target=None, grid_step: float = DEFAULT_ES_STEP, es_cap: int = DEFAULT_ES_CAP,
               max_sweeps: int = 100, tol: float = 1e-9) -> np.ndarray:
    """Dispatch by policy name. RT uses ``target`` if given, else a random in-scope receiver."""
    policy = BeamPolicy(policy)
    if policy is BeamPolicy.RB:
        return run_rb(channels, rng, scope)
    if policy is BeamPolicy.RT:
        if target is None:
            return run_rt_random(channels, rng, scope)
        return run_rt(channels, target, scope)
    if policy is BeamPolicy.BT:
        return run_bt(channels, amps, scope)
    if policy is BeamPolicy.SF:
        return run_sf(channels, amps, scope)
    if policy is BeamPolicy.IO:
        return run_io(channels, amps, max_sweeps, tol, scope)
    return run_es(channels, amps, grid_step, es_cap, scope)

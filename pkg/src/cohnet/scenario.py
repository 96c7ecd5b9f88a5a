"""Node geometry and channel construction for transmitter/receiver groups.

Three propagation models are supported:

* ``inverse_square`` -- power gain ``d**-2``
* ``free_space``     -- Friis, ``Gt*Gr*lam**2 / (4*pi*d)**2``
* ``two_ray``        -- Friis below the crossover distance, ``d**-4`` ground
  reflection above it
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


class ChannelModel(str, enum.Enum):
    INVERSE_SQUARE = "inverse_square"
    FREE_SPACE = "free_space"
    TWO_RAY = "two_ray"


@dataclass(frozen=True)
class ScenarioConfig:
    n_transmitters: int = 1
    n_receivers: int = 1
    n_streams: int = 1
    distance: float = 1000.0
    radius: float = 10.0
    wavelength: float = 0.125
    channel_model: ChannelModel = ChannelModel.INVERSE_SQUARE
    tx_gain: float = 1.0
    rx_gain: float = 1.0
    tx_height: float = 0.5
    rx_height: float = 0.5
    seed: int = 0

    def __post_init__(self):
        # accept plain strings from config files
        object.__setattr__(self, "channel_model", ChannelModel(self.channel_model))
        for name in ("n_transmitters", "n_receivers", "n_streams"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.n_streams > min(self.n_transmitters, self.n_receivers):
            raise ValueError(
                f"n_streams={self.n_streams} exceeds min(n_transmitters, n_receivers)="
                f"{min(self.n_transmitters, self.n_receivers)}"
            )
        for name in ("distance", "radius", "wavelength", "tx_gain", "rx_gain",
                     "tx_height", "rx_height"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def crossover_distance(self) -> float:
        """Two-ray crossover distance ``4*pi*ht*hr / lam``."""
        return 4.0 * np.pi * self.tx_height * self.rx_height / self.wavelength


@dataclass(frozen=True)
class NodeLayout:
    transmitter_positions: np.ndarray  # (N, 2) meters
    receiver_positions: np.ndarray  # (M, 2) meters

    @property
    def n_transmitters(self) -> int:
        return len(self.transmitter_positions)

    @property
    def n_receivers(self) -> int:
        return len(self.receiver_positions)

    def distances(self) -> np.ndarray:
        """Euclidean transmitter-to-receiver distances, shape (N, M)."""
        diff = self.transmitter_positions[:, None, :] - self.receiver_positions[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])


@dataclass(frozen=True)
class ChannelMatrix:
    """Per-link amplitude ``gains`` (h, not h**2) and observed ``phases``.

    Both arrays are indexed ``[transmitter, receiver]``.
    """

    gains: np.ndarray
    phases: np.ndarray
    power: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=float)
        phases = np.asarray(self.phases, dtype=float)
        if gains.ndim != 2 or gains.shape != phases.shape:
            raise ValueError(f"gains {gains.shape} and phases {phases.shape} must be equal 2-D shapes")
        if not np.all(np.isfinite(gains)) or np.any(gains <= 0):
            raise ValueError("channel gains must be finite and > 0")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "phases", wrap_phase(phases))
        object.__setattr__(self, "power", gains**2)

    @property
    def shape(self) -> tuple[int, int]:
        return self.gains.shape

    @property
    def n_transmitters(self) -> int:
        return self.gains.shape[0]

    @property
    def n_receivers(self) -> int:
        return self.gains.shape[1]


def wrap_phase(x):
    """Reduce angles to ``[0, 2*pi)``.

    ``np.mod`` can return exactly ``2*pi`` for tiny negative inputs, which is
    folded back to 0.
    """
    out = np.mod(x, TWO_PI)
    if np.ndim(out) == 0:
        return 0.0 if out >= TWO_PI else float(out)
    out = np.asarray(out, dtype=float)
    out[out >= TWO_PI] = 0.0
    return out


def _disk(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    u = rng.random(n)
    v = rng.random(n)
    rho = radius * np.sqrt(u)
    ang = TWO_PI * v
    return np.column_stack([rho * np.cos(ang), rho * np.sin(ang)])


def place_nodes(config: ScenarioConfig, rng: np.random.Generator) -> NodeLayout:
    """Anchor transmitter 1 at the origin and receiver 1 at ``(D, 0)``.

    The remaining nodes of each group are uniform over the disk of radius
    ``config.radius`` around their anchor. Transmitters are drawn before
    receivers, so the draw order is part of the reproducibility contract.
    """
    tx = np.zeros((config.n_transmitters, 2))
    tx[1:] = _disk(rng, config.n_transmitters - 1, config.radius)
    rx = np.zeros((config.n_receivers, 2))
    rx[:, 0] = config.distance
    rx[1:] += _disk(rng, config.n_receivers - 1, config.radius)
    return NodeLayout(tx, rx)


def channel_gain(d, config: ScenarioConfig):
    """Power gain ``h**2`` at distance ``d`` (scalar or array) under ``config``'s model."""
    d = np.asarray(d, dtype=float)
    if np.any(~(d > 0)):
        raise ValueError("distance must be > 0 (coincident nodes are not allowed)")
    model = config.channel_model
    if model is ChannelModel.INVERSE_SQUARE:
        g = d**-2.0
    else:
        friis = config.tx_gain * config.rx_gain * config.wavelength**2 / (4.0 * np.pi * d) ** 2
        if model is ChannelModel.FREE_SPACE:
            g = friis
        else:
            ground = config.tx_gain * config.rx_gain * (config.tx_height * config.rx_height) ** 2 / d**4
            g = np.where(d < config.crossover_distance, friis, ground)
    return float(g) if g.ndim == 0 else g


def phase_shift(d, wavelength: float):
    """Propagation phase ``2*pi*frac(d/lam)`` in ``[0, 2*pi)``."""
    d = np.asarray(d, dtype=float)
    if np.any(~(d > 0)) or not wavelength > 0:
        raise ValueError("distance and wavelength must be > 0")
    cycles = d / wavelength
    return wrap_phase(TWO_PI * (cycles - np.floor(cycles)))


def build_channels(layout: NodeLayout, config: ScenarioConfig) -> ChannelMatrix:
    d = layout.distances()
    return ChannelMatrix(np.sqrt(channel_gain(d, config)), phase_shift(d, config.wavelength))


def make_scenario(config: ScenarioConfig, rng: np.random.Generator) -> tuple[NodeLayout, ChannelMatrix]:
    layout = place_nodes(config, rng)
    return layout, build_channels(layout, config)

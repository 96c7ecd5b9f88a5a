"""Network formation: assigning pooled transmitters and receivers to streams.

Sources are transmitters ``0..K-1`` and destinations receivers ``0..K-1`` by
convention; every other node is free and joins exactly one stream.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .beamforming import BeamPolicy, ComplexityError, run_policy
from .gain import StreamAssignment, SirReport, sir_report
from .scenario import ChannelMatrix, NodeLayout


class FormationPolicy(str, enum.Enum):
    RANDOM = "random"
    DISTANCE = "distance"
    EXHAUSTIVE = "exhaustive"


_FORMATION_CODES = {"R": FormationPolicy.RANDOM, "D": FormationPolicy.DISTANCE}
_BEAM_CODES = {"RB": BeamPolicy.RB, "RT": BeamPolicy.RT, "BT": BeamPolicy.BT}


@dataclass(frozen=True)
class JointProtocol:
    formation: FormationPolicy
    beam: BeamPolicy

    @classmethod
    def parse(cls, name: str) -> "JointProtocol":
        """Parse one of RRB, RRT, RBT, DRB, DRT, DBT."""
        name = name.upper()
        if len(name) != 3 or name[0] not in _FORMATION_CODES or name[1:] not in _BEAM_CODES:
            raise ValueError(f"unknown joint protocol {name!r}")
        return cls(_FORMATION_CODES[name[0]], _BEAM_CODES[name[1:]])

    @property
    def name(self) -> str:
        f = "R" if self.formation is FormationPolicy.RANDOM else "D"
        return f + self.beam.value


JOINT_PROTOCOLS = ("RRB", "RRT", "RBT", "DRB", "DRT", "DBT")


def default_endpoints(K: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return tuple(range(K)), tuple(range(K))


def _check_endpoints(K, N, M, sources, destinations):
    if K < 1 or K > min(N, M):
        raise ValueError(f"need 1 <= K <= min(N, M); got K={K}, N={N}, M={M}")
    if len(sources) != K or len(destinations) != K:
        raise ValueError("need exactly K sources and K destinations")
    if len(set(sources)) != K or len(set(destinations)) != K:
        raise ValueError("sources and destinations must be distinct")
    if any(not 0 <= s < N for s in sources) or any(not 0 <= d < M for d in destinations):
        raise ValueError("source or destination index out of range")


def _labels(n_nodes, heads, free_labels):
    labels = np.empty(n_nodes, dtype=int)
    free = [i for i in range(n_nodes) if i not in set(heads)]
    labels[list(heads)] = np.arange(len(heads))
    labels[free] = free_labels
    return labels


def random_formation(K, N, M, sources, destinations, rng: np.random.Generator) -> StreamAssignment:
    _check_endpoints(K, N, M, sources, destinations)
    tx_free = rng.integers(0, K, N - K)
    rx_free = rng.integers(0, K, M - K)
    return StreamAssignment.from_labels(
        _labels(N, sources, tx_free), _labels(M, destinations, rx_free), sources, destinations
    )


def _nearest(points, heads):
    d = np.hypot(*(points[:, None, :] - heads[None, :, :]).transpose(2, 0, 1))
    return np.argmin(d, axis=1)  # first minimum -> lowest stream index on ties


def distance_formation(layout: NodeLayout, sources, destinations) -> StreamAssignment:
    N, M, K = layout.n_transmitters, layout.n_receivers, len(sources)
    _check_endpoints(K, N, M, sources, destinations)
    tx, rx = layout.transmitter_positions, layout.receiver_positions
    tx_lab = _nearest(tx, tx[list(sources)])
    rx_lab = _nearest(rx, rx[list(destinations)])
    # heads always lead their own stream even if co-located with another head
    tx_lab[list(sources)] = np.arange(K)
    rx_lab[list(destinations)] = np.arange(K)
    return StreamAssignment.from_labels(tx_lab, rx_lab, sources, destinations)


def beamform_streams(channels: ChannelMatrix, assignment: StreamAssignment, beam, amps=None,
                     rng=None) -> np.ndarray:
    """Run ``beam`` independently inside every stream and merge the phases.

    Each stream's source is its reference transmitter.
    """
    theta = np.zeros(channels.n_transmitters)
    for k in range(assignment.n_streams):
        tx = [assignment.sources[k]] + [n for n in assignment.tx_sets[k] if n != assignment.sources[k]]
        scope = (tx, list(assignment.rx_sets[k]))
        part = run_policy(beam, channels, amps, rng, scope)
        theta[tx] = part[tx]
    return theta


def run_joint(protocol, channels: ChannelMatrix, layout: NodeLayout, amps=None,
              rng: np.random.Generator | None = None, n_streams: int = 2,
              sources=None, destinations=None):
    """Form groups, beamform per stream and score with the min objective.

    ``rng`` is split into independent formation and beamforming children, so
    protocols sharing a formation policy see the same random groups for the
    same generator seed.
    """
    if isinstance(protocol, str):
        protocol = JointProtocol.parse(protocol)
    if n_streams < 2:
        raise ValueError("joint protocols need K >= 2")
    if sources is None or destinations is None:
        sources, destinations = default_endpoints(n_streams)
    rng = rng if rng is not None else np.random.default_rng()
    form_rng, beam_rng = rng.spawn(2)
    N, M = channels.shape
    if protocol.formation is FormationPolicy.RANDOM:
        assignment = random_formation(len(sources), N, M, sources, destinations, form_rng)
    else:
        assignment = distance_formation(layout, sources, destinations)
    theta = beamform_streams(channels, assignment, protocol.beam, amps, beam_rng)
    return assignment, theta, sir_report(channels, theta, assignment, amps)


def count_formations(K, N, M) -> int:
    return K ** (N - K) * K ** (M - K)


def exhaustive_formation(channels: ChannelMatrix, layout: NodeLayout, amps=None,
                         beam=BeamPolicy.BT, cap: int = 10**5, n_streams: int = 2,
                         sources=None, destinations=None, rng=None) -> tuple[StreamAssignment, SirReport]:
    """Best assignment over every way of distributing the free nodes.

    Assignments are visited in lexicographic order of (transmitter labels,
    receiver labels); only a strictly better objective replaces the incumbent.
    """
    if sources is None or destinations is None:
        sources, destinations = default_endpoints(n_streams)
    N, M = channels.shape
    K = len(sources)
    _check_endpoints(K, N, M, sources, destinations)
    total = count_formations(K, N, M)
    if total > cap:
        raise ComplexityError(f"{total} formations exceed the enumeration cap {cap}")
    best = None
    for tx_free in itertools.product(range(K), repeat=N - K):
        tx_lab = _labels(N, sources, list(tx_free))
        for rx_free in itertools.product(range(K), repeat=M - K):
            a = StreamAssignment.from_labels(tx_lab, _labels(M, destinations, list(rx_free)),
                                             sources, destinations)
            theta = beamform_streams(channels, a, beam, amps, rng)
            rep = sir_report(channels, theta, a, amps)
            if best is None or rep.objective > best[1].objective:
                best = (a, rep)
    return best

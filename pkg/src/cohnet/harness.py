"""Seeded Monte-Carlo experiments, config files and table output.

Seeding: every seed ``s`` owns independent named substreams
(``substream(s, "placement")``, ``"rb"``, ``"rt"``, ``"joint"``), derived as
``SeedSequence(entropy=s, spawn_key=(crc32(name),))``. Adding or removing a
protocol therefore never shifts the node placement or another protocol's
draws. Results are collected per seed index and reduced afterwards, so
parallel and serial runs are bit-identical.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .beamforming import DEFAULT_ES_CAP, DEFAULT_ES_STEP, BeamPolicy, run_policy
from .formation import JOINT_PROTOCOLS, JointProtocol, run_joint
from .gain import gain_value
from .linkbudget import LinkBudgetParams
from .scenario import ChannelModel, ScenarioConfig, make_scenario

SCHEMA_VERSION = 1
CSV_HEADER = ["scenario", "protocol", "mean", "std", "min", "max", "n_seeds"]
BEAM_PROTOCOLS = tuple(p.value for p in BeamPolicy)


class ConfigError(ValueError):
    pass


def substream(seed: int, name: str) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(zlib.crc32(name.encode()),))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class Outputs:
    csv_path: str | None = None
    markdown: bool = False


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: ScenarioConfig
    protocols: tuple[str, ...]
    n_seeds: int = 100
    base_seed: int = 0
    sizes: tuple[tuple[int, int], ...] = ()  # (N, M) rows; empty -> the scenario's own size
    es_grid_step: float = DEFAULT_ES_STEP
    es_cap: int = DEFAULT_ES_CAP
    link_budget: LinkBudgetParams = field(default_factory=LinkBudgetParams)
    outputs: Outputs = field(default_factory=Outputs)

    def __post_init__(self):
        if self.n_seeds < 1:
            raise ConfigError("n_seeds must be >= 1")
        if not self.protocols:
            raise ConfigError("protocol list must not be empty")
        joint = self.scenario.n_streams >= 2
        for p in self.protocols:
            if joint and p not in JOINT_PROTOCOLS:
                raise ConfigError(f"protocol {p!r} is not a joint protocol; with n_streams >= 2 "
                                  f"use {', '.join(JOINT_PROTOCOLS)}")
            if not joint and p not in BEAM_PROTOCOLS:
                raise ConfigError(f"protocol {p!r} is not a beamforming protocol; with n_streams == 1 "
                                  f"use {', '.join(BEAM_PROTOCOLS)}")
        for n, m in self.row_sizes():
            if self.scenario.n_streams > min(n, m):
                raise ConfigError(f"n_streams={self.scenario.n_streams} exceeds min(N, M) for size ({n}, {m})")

    def row_sizes(self) -> tuple[tuple[int, int], ...]:
        if self.sizes:
            return tuple((int(n), int(m)) for n, m in self.sizes)
        return ((self.scenario.n_transmitters, self.scenario.n_receivers),)


# --- config files -----------------------------------------------------------

def _build(cls, data, where: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls) if f.init}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def spec_from_dict(data: dict) -> ExperimentSpec:
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping")
    data = dict(data)
    version = data.pop("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported config version {version} (expected {SCHEMA_VERSION})")
    allowed = {"scenario", "protocols", "n_seeds", "base_seed", "sizes", "es_grid_step", "es_cap",
               "link_budget", "outputs"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown top-level field(s) {', '.join(unknown)}")
    if "scenario" not in data:
        raise ConfigError("missing required field 'scenario'")
    if "protocols" not in data:
        raise ConfigError("missing required field 'protocols'")
    scenario = _build(ScenarioConfig, data.pop("scenario"), "scenario")
    link = _build(LinkBudgetParams, data.pop("link_budget", None), "link_budget")
    outputs = _build(Outputs, data.pop("outputs", None), "outputs")
    protocols = data.pop("protocols")
    if isinstance(protocols, str) or not isinstance(protocols, list):
        raise ConfigError("protocols: expected a list of protocol names")
    sizes = data.pop("sizes", None) or ()
    try:
        sizes = tuple((int(n), int(m)) for n, m in sizes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"sizes: expected a list of [N, M] pairs ({exc})") from exc
    try:
        return ExperimentSpec(scenario=scenario, protocols=tuple(str(p).upper() for p in protocols),
                              sizes=sizes, link_budget=link, outputs=outputs, **data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def spec_to_dict(spec: ExperimentSpec) -> dict:
    scenario = dataclasses.asdict(spec.scenario)
    scenario["channel_model"] = spec.scenario.channel_model.value
    return {
        "version": SCHEMA_VERSION,
        "scenario": scenario,
        "protocols": list(spec.protocols),
        "n_seeds": spec.n_seeds,
        "base_seed": spec.base_seed,
        "sizes": [list(s) for s in spec.sizes],
        "es_grid_step": spec.es_grid_step,
        "es_cap": spec.es_cap,
        "link_budget": dataclasses.asdict(spec.link_budget),
        "outputs": dataclasses.asdict(spec.outputs),
    }


def dump_spec(spec: ExperimentSpec) -> str:
    return yaml.safe_dump(spec_to_dict(spec), sort_keys=False)


def loads_spec(text: str, source: str = "<string>") -> ExperimentSpec:
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise ConfigError(f"{where}: {exc.problem}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    try:
        return spec_from_dict(data)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_spec(path) -> ExperimentSpec:
    path = Path(path)
    return loads_spec(path.read_text(), str(path))


# --- running ------------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    mean: float
    std: float
    min: float
    max: float
    n_seeds: int

    @classmethod
    def of(cls, values) -> "Cell":
        v = np.asarray(values, dtype=float)
        return cls(float(v.mean()), float(v.std()), float(v.min()), float(v.max()), len(v))


@dataclass
class ResultTable:
    rows: list[str]
    protocols: list[str]
    cells: dict[tuple[str, str], Cell]
    values: dict[tuple[str, str], np.ndarray] = field(default_factory=dict, repr=False)

    def cell(self, row, protocol) -> Cell:
        return self.cells[(row, protocol)]

    def merge(self, other: "ResultTable") -> "ResultTable":
        protocols = self.protocols + [p for p in other.protocols if p not in self.protocols]
        return ResultTable(self.rows + other.rows, protocols, {**self.cells, **other.cells},
                           {**self.values, **other.values})


def row_label(n, m, k=1) -> str:
    return f"({n},{m})" if k == 1 else f"({n},{m},{k})"


def _seed_values(args):
    """All protocol values for one (size, seed); runs in worker processes."""
    spec, size, seed = args
    cfg = dataclasses.replace(spec.scenario, n_transmitters=size[0], n_receivers=size[1])
    layout, channels = make_scenario(cfg, substream(seed, "placement"))
    out = {}
    for p in spec.protocols:
        if p in JOINT_PROTOCOLS:
            _, _, rep = run_joint(p, channels, layout, rng=substream(seed, "joint"),
                                  n_streams=cfg.n_streams)
            out[p] = rep.objective
            continue
        if p == "ES" and size[0] > spec.es_cap:
            continue
        rng = substream(seed, "rb" if p == "RB" else "rt")
        theta = run_policy(p, channels, rng=rng, grid_step=spec.es_grid_step, es_cap=spec.es_cap)
        out[p] = gain_value(channels, theta)
    return out


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ResultTable:
    seeds = range(spec.base_seed, spec.base_seed + spec.n_seeds)
    sizes = spec.row_sizes()
    jobs = [(spec, size, s) for size in sizes for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_seed_values, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_seed_values(j) for j in jobs]
    rows, cells, values = [], {}, {}
    for i, size in enumerate(sizes):
        label = row_label(*size, spec.scenario.n_streams)
        rows.append(label)
        chunk = results[i * spec.n_seeds:(i + 1) * spec.n_seeds]
        for p in spec.protocols:
            v = [r[p] for r in chunk if p in r]
            if v:
                values[(label, p)] = np.array(v)
                cells[(label, p)] = Cell.of(v)
    return ResultTable(rows, list(spec.protocols), cells, values)


# --- output -------------------------------------------------------------------

def table_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in table.rows:
        for p in table.protocols:
            c = table.cells.get((row, p))
            if c is not None:
                w.writerow([row, p, repr(c.mean), repr(c.std), repr(c.min), repr(c.max), c.n_seeds])
    return buf.getvalue()


def table_markdown(table: ResultTable, digits: int = 2) -> str:
    head = ["(N,M)"] + table.protocols
    lines = ["| " + " | ".join(head) + " |", "|" + "|".join(["---"] * len(head)) + "|"]
    for row in table.rows:
        cells = [f"{table.cells[(row, p)].mean:.{digits}f}" if (row, p) in table.cells else "-"
                 for p in table.protocols]
        lines.append("| " + " | ".join([row] + cells) + " |")
    return "\n".join(lines) + "\n"


def read_table_csv(text: str) -> ResultTable:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows, protocols, cells = [], [], {}
    for r in reader:
        if r["scenario"] not in rows:
            rows.append(r["scenario"])
        if r["protocol"] not in protocols:
            protocols.append(r["protocol"])
        cells[(r["scenario"], r["protocol"])] = Cell(float(r["mean"]), float(r["std"]), float(r["min"]),
                                                     float(r["max"]), int(r["n_seeds"]))
    return ResultTable(rows, protocols, cells)


def emit(table: ResultTable, path=None, fmt: str = "csv") -> str:
    """Render ``table`` as CSV or markdown, writing it to ``path`` when given."""
    if not table.cells:
        raise ValueError("refusing to emit an empty table")
    if fmt not in ("csv", "md"):
        raise ValueError(f"unknown format {fmt!r}")
    text = table_csv(table) if fmt == "csv" else table_markdown(table)
    if path is not None:
        Path(path).write_text(text)
    return text


# --- presets ------------------------------------------------------------------

_SETTINGS = {
    # key: (channel model, D, r)
    "t1": (ChannelModel.INVERSE_SQUARE, 1000.0, 10.0),
    "t3": (ChannelModel.FREE_SPACE, 1000.0, 100.0),
    "t4": (ChannelModel.TWO_RAY, 1000.0, 100.0),
    "t5": (ChannelModel.FREE_SPACE, 10000.0, 100.0),
    "t6": (ChannelModel.TWO_RAY, 10000.0, 100.0),
    "t7": (ChannelModel.FREE_SPACE, 1000.0, 100.0),
    "t8": (ChannelModel.TWO_RAY, 1000.0, 100.0),
    "t9": (ChannelModel.FREE_SPACE, 10000.0, 100.0),
    "t10": (ChannelModel.TWO_RAY, 10000.0, 100.0),
}
PRESETS = tuple(_SETTINGS)


def preset(name: str, n_seeds: int = 100, base_seed: int = 0) -> ExperimentSpec:
    """Experiment reproducing one gain table layout (t1, t3..t10)."""
    if name not in _SETTINGS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    model, D, r = _SETTINGS[name]
    joint = name in ("t7", "t8", "t9", "t10")
    if name == "t1":
        sizes = ((1, 1), (1, 10), (3, 1), (3, 10), (10, 10))
    else:
        sizes = ((3, 10), (10, 10))
    scenario = ScenarioConfig(n_transmitters=sizes[-1][0], n_receivers=sizes[-1][1],
                              n_streams=2 if joint else 1, distance=D, radius=r, channel_model=model)
    protocols = JOINT_PROTOCOLS if joint else BEAM_PROTOCOLS
    return ExperimentSpec(scenario, tuple(protocols), n_seeds, base_seed, sizes)

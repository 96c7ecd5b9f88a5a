"""Command line entry point: ``cohnet {gain,table,formation,doppler,rate}``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
from pathlib import Path

import numpy as np

from . import harness
from .beamforming import ComplexityError, run_policy
from .formation import JOINT_PROTOCOLS
from .gain import coherent_gain, triangle_bound
from .linkbudget import LinkBudgetParams, OverheadParams, doppler_tolerance, rate_curve
from .scenario import make_scenario


def _write(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _rows_to_text(header, rows, fmt):
    if fmt == "md":
        lines = ["| " + " | ".join(header) + " |", "|" + "|".join(["---"] * len(header)) + "|"]
        lines += ["| " + " | ".join(str(x) for x in r) + " |" for r in rows]
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_gain(args):
    spec = harness.load_spec(args.config)
    if spec.scenario.n_streams != 1:
        raise harness.ConfigError("gain works on single-stream configs; use 'formation' for n_streams >= 2")
    seed = spec.scenario.seed if args.seed is None else args.seed
    scenario = spec.scenario
    layout, channels = make_scenario(scenario, harness.substream(seed, "placement"))
    rows = []
    for p in spec.protocols:
        if p == "ES" and scenario.n_transmitters > spec.es_cap:
            continue
        rng = harness.substream(seed, "rb" if p == "RB" else "rt")
        theta = run_policy(p, channels, rng=rng, grid_step=spec.es_grid_step, es_cap=spec.es_cap)
        rep = coherent_gain(channels, theta)
        rows.append([p, repr(rep.gain), rep.upper_bound, repr(triangle_bound(channels))])
    _write(_rows_to_text(["protocol", "gain", "upper_bound", "triangle_bound"], rows, args.format), args.out)


def _run_table(spec, args):
    table = harness.run_experiment(spec, workers=args.workers)
    _write(harness.emit(table, None, args.format), args.out)


def cmd_table(args):
    spec = harness.preset(args.preset, n_seeds=args.seeds, base_seed=args.seed or 0)
    _run_table(spec, args)


def cmd_formation(args):
    spec = harness.load_spec(args.config)
    if spec.scenario.n_streams < 2:
        raise harness.ConfigError("formation needs n_streams >= 2 in the scenario")
    if args.seeds is not None:
        spec = dataclasses.replace(spec, n_seeds=args.seeds)
    if args.seed is not None:
        spec = dataclasses.replace(spec, base_seed=args.seed)
    if not set(spec.protocols) <= set(JOINT_PROTOCOLS):
        raise harness.ConfigError("formation runs joint protocols only")
    _run_table(spec, args)


def cmd_doppler(args):
    if not (0 < args.dmin < args.dmax) or args.steps < 2:
        raise ValueError("need 0 < dmin < dmax and steps >= 2")
    params = LinkBudgetParams(overhead_fraction=args.fo, group_size=args.n)
    rows = []
    for d in np.linspace(args.dmin, args.dmax, args.steps):
        rows.append([repr(float(d)), repr(doppler_tolerance(params, float(d), args.rounding).doppler_spread)])
    _write(_rows_to_text(["D_m", "S_Hz"], rows, args.format), args.out)


def cmd_rate(args):
    if not (0 < args.dmin < args.dmax) or args.steps < 2:
        raise ValueError("need 0 < dmin < dmax and steps >= 2")
    overhead = OverheadParams(args.training_ms * 1e-3, args.guard_ms * 1e-3)
    distances = np.geomspace(args.dmin, args.dmax, args.steps)
    res = rate_curve(LinkBudgetParams(), distances, args.n, args.coherence_ms * 1e-3, overhead)
    rows = [[repr(float(r.distance)), repr(r.coherent_rate), repr(r.p2p_rate), int(r.infeasible)] for r in res]
    _write(_rows_to_text(["D_m", "rate_coherent", "rate_p2p", "infeasible"], rows, args.format), args.out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed (base seed for tables)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "md"), default="csv")

    parser = argparse.ArgumentParser(prog="cohnet", description="Coherent group communication simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gain", parents=[common], help="gains of one seeded scenario")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_gain)

    p = sub.add_parser("table", parents=[common], help="reproduce a gain table layout")
    p.add_argument("--preset", required=True, choices=harness.PRESETS)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("formation", parents=[common], help="six joint protocols for a multi-stream config")
    p.add_argument("--config", required=True)
    p.add_argument("--seeds", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_formation)

    p = sub.add_parser("doppler", parents=[common], help="tolerable Doppler spread vs distance")
    p.add_argument("--fo", type=float, default=0.1, help="overhead fraction")
    p.add_argument("--n", type=int, default=10, help="group size")
    p.add_argument("--dmin", type=float, default=1000.0)
    p.add_argument("--dmax", type=float, default=10000.0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--rounding", choices=("continuous", "ceil"), default="continuous")
    p.set_defaults(func=cmd_doppler)

    p = sub.add_parser("rate", parents=[common], help="coherent vs point-to-point rate model")
    p.add_argument("--n", type=int, default=10, help="group size (N = M)")
    p.add_argument("--coherence-ms", type=float, default=100.0)
    p.add_argument("--dmin", type=float, default=1000.0)
    p.add_argument("--dmax", type=float, default=100000.0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--training-ms", type=float, default=OverheadParams().training_time * 1e3)
    p.add_argument("--guard-ms", type=float, default=OverheadParams().guard_time * 1e3)
    p.set_defaults(func=cmd_rate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (harness.ConfigError, ValueError, ComplexityError, OSError) as exc:
        print(f"cohnet: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

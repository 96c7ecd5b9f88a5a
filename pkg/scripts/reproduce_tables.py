"""Run the gain-table presets and write CSV plus markdown per table.

    python3 scripts/reproduce_tables.py --seeds 100 --workers 4 --out results
"""

import argparse
from pathlib import Path

from cohnet.harness import PRESETS, emit, preset, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tables", nargs="+", default=list(PRESETS), choices=PRESETS)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--base-seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.tables:
        table = run_experiment(preset(name, args.seeds, args.base_seed), workers=args.workers)
        emit(table, out / f"{name}.csv")
        print(f"## {name}\n")
        print(emit(table, out / f"{name}.md", fmt="md"))


if __name__ == "__main__":
    main()

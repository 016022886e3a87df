"""Run the named experiments and store JSON reports under results/.

    python scripts/run_experiments.py                 # all four
    python scripts/run_experiments.py ratio-sweep --seed 3
"""

import argparse
import json
import sys
from pathlib import Path

from matroid_portfolio.experiments import EXPERIMENTS, render


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=list(EXPERIMENTS))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    unknown = [n for n in args.names if n not in EXPERIMENTS]
    if unknown:
        print(f"unknown experiments: {unknown}", file=sys.stderr)
        return 2
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    for name in args.names:
        report = EXPERIMENTS[name](seed=args.seed)
        (out / f"{name}.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
        print(render(report), end="\n\n")
        ok &= report["passed"]
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

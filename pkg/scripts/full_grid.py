#!/usr/bin/env python3
"""Full-scale simulation grid: 6 models x 4 block exponents x 4 sample sizes.

At the published scale (1000 replications, 500 bootstrap replicates, n up to
100000) this is a multi-hour batch run; the desk-scale acceptance suite covers
the same code paths in minutes.  Cells are written incrementally so an
interrupted run can be resumed with --skip-existing.

Example:
    python scripts/full_grid.py --out-dir grid_results --reps 1000 --k 500
"""

import argparse
import time
from pathlib import Path

from blocksgd.cli import RESULT_COLUMNS, SimulationConfig, simulate, write_rows

EXPONENTS = (0.2, 0.3, 0.5, 0.7)
SAMPLE_SIZES = (10000, 20000, 50000, 100000)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="grid_results")
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--k", type=int, default=500)
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--models", default="1,2,3,4,5,6", help="comma-separated model ids")
    parser.add_argument("--baseline", action="store_true", help="also run the naive per-observation bootstrap")
    parser.add_argument("--skip-existing", action="store_true")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    models = [int(m) for m in args.models.split(",")]

    for model_id in models:
        for a in EXPONENTS:
            for n in SAMPLE_SIZES:
                path = out_dir / f"model{model_id}_a{a}_n{n}.csv"
                if args.skip_existing and path.exists():
                    print(f"skip {path}")
                    continue
                cfg = SimulationConfig(
                    model_id=model_id,
                    n=n,
                    block_exponent=a,
                    reps=args.reps,
                    k=args.k,
                    alpha=args.alpha,
                    seed=args.seed,
                    baseline=args.baseline,
                )
                t0 = time.perf_counter()
                rows = simulate(cfg)
                write_rows(path, rows, RESULT_COLUMNS)
                print(f"{path} done in {time.perf_counter() - t0:.0f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

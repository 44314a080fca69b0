#!/usr/bin/env python3
"""Run the bundled benchmark tables and print them.

Examples:
    python scripts/run_tables.py --table 2 --reps 100 --seed 20150105
    python scripts/run_tables.py --table 1 --reps 100 --threads 2 --out table1.json

Tables 2/3/4/6 hold nine configs each and take a few minutes at 100
replicates; pass --reps 20 for a quick look.
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lljd.mcstudy import run_study, table_presets  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--table", type=int, required=True, choices=[1, 2, 3, 4, 5, 6])
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--seed", type=int, default=20150105)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default=None, help="also dump the reports as JSON")
    args = ap.parse_args()

    configs = table_presets(
        args.table, replicates=args.reps, master_seed=args.seed, workers=args.threads
    )
    reports = []
    t0 = time.perf_counter()
    for cfg in configs:
        rep = run_study(cfg)
        reports.append(rep)
        short = {"local_linear": "ll", "nadaraya_watson": "nw"}
        print(f"{rep.label:42s}", end="")
        for method in rep.methods:
            print(f"  rmse[{short.get(method, method)}]={rep.rmse[method]:.4f}", end="")
        print(f"  (skipped {rep.skipped})")
        if args.table in (1, 5):
            q = ", ".join(f"{int(100*p)}%" for p in rep.quantiles)
            print(f"  quantiles: {q}")
            for method in rep.methods:
                vals = ", ".join(f"{v:+.4f}" for v in rep.bias_at_quantiles[method])
                print(f"  bias {method:16s}: {vals}")
    print(f"total {time.perf_counter() - t0:.1f}s")

    if args.out:
        payload = {
            "schema_version": 1,
            "kind": "benchmark_table",
            "table": args.table,
            "configs": [r.to_dict() for r in reports],
        }
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

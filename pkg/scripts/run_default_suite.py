#!/usr/bin/env python3
"""Run the default benchmark suite and write results.csv next to this script."""

import sys
from pathlib import Path

from rbfbench.bench import run_benchmark

REPO = Path(__file__).resolve().parent.parent


def main() -> int:
    out = REPO / "results.csv"
    report = run_benchmark(REPO / "configs" / "default.json", out_path=out)
    for err in report.errors:
        print(f"solve failed: {err}", file=sys.stderr)
    print(f"wrote {len(report.rows)} rows to {out}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

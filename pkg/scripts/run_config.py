"""Run a benchmark config and write results.csv, table.md and run.json.

usage: python3 scripts/run_config.py scripts/configs/scc_table.cfg -o results/scc
"""
import argparse
import sys
from pathlib import Path

from asbuchi import bench


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("-o", "--output", required=True)
    ap.add_argument("--sizes", help="override the config's sizes, comma separated")
    ap.add_argument("--seeds", help="override the config's seeds, e.g. 0-9")
    args = ap.parse_args()
    cfg = bench.parse_config(Path(args.config).read_text())
    if args.sizes:
        cfg.sizes = bench._int_list(args.sizes)
    if args.seeds:
        cfg.seeds = bench._int_list(args.seeds)
    report = bench.run_benchmark(cfg, progress=lambda gid: print(gid, file=sys.stderr))
    bench.write_report(report, args.output)
    sys.stdout.write(report.to_markdown())
    for e in report.errors:
        print(e, file=sys.stderr)
    return 1 if report.errors else 0


if __name__ == "__main__":
    sys.exit(main())

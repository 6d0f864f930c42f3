#!/usr/bin/env python3
"""Render a sweep CSV (from `tgc sweep --format csv`) as an ASCII chart.

Usage: sweep_chart.py [file.csv]   (reads stdin when no file is given)
"""
import csv
import sys


def main() -> int:
    stream = open(sys.argv[1]) if len(sys.argv) > 1 else sys.stdin
    with stream:
        rows = list(csv.reader(stream))
    if len(rows) < 2 or rows[0][:2] != ["t", "mean"]:
        print("expected the sweep CSV header 't,mean,...'", file=sys.stderr)
        return 2
    ts = [float(r[0]) for r in rows[1:]]
    ys = [float(r[1]) for r in rows[1:]]
    lo, hi = min(ys), max(ys)
    span = (hi - lo) or 1.0
    width = 48
    print(f"{'t':>8}  {'mean':>12}")
    for t, y in zip(ts, ys):
        bar = "#" * (1 + round((y - lo) / span * (width - 1)))
        print(f"{t:8.3g}  {y:12.6g}  {bar}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

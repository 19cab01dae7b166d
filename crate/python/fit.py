"""Scaling fits over an experiment CSV written by `hyptw experiment`.

For every (exp, d, stage, metric) series with at least three distinct n it
prints the per-n medians and three least-squares fits of the median:
linear in log2 n, linear in log2^2 n, and the exponent of n.

    python3 python/fit.py results.csv [--metric size]
"""

import argparse
import csv
import math
import statistics
import sys
from collections import defaultdict


def line(xs, ys):
    mx, my = statistics.fmean(xs), statistics.fmean(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    r2 = 1.0 if syy == 0 else sxy * sxy / (sxx * syy)
    return slope, my - slope * mx, r2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("--metric", action="append", help="only fit these metrics")
    args = ap.parse_args()

    series = defaultdict(lambda: defaultdict(list))
    with open(args.csv, newline="") as f:
        for row in csv.DictReader(f):
            if row["status"] != "ok" or (args.metric and row["metric"] not in args.metric):
                continue
            try:
                v = float(row["value"])
            except ValueError:
                continue
            key = (row["exp"], row["d"], row["stage"], row["metric"])
            series[key][int(row["n"])].append(v)

    fitted = 0
    for (exp, d, stage, metric), by_n in sorted(series.items()):
        ns = sorted(n for n in by_n if n > 1)
        if len(ns) < 3:
            continue
        med = [statistics.median(by_n[n]) for n in ns]
        logs = [math.log2(n) for n in ns]
        print(f"{exp} d={d} {stage}/{metric}")
        print("  n      " + " ".join(f"{n:>9}" for n in ns))
        print("  median " + " ".join(f"{m:>9.3f}" for m in med))
        a, b, r2 = line(logs, med)
        print(f"  log2 n     slope {a:9.4f} intercept {b:9.4f} R2 {r2:.3f}")
        a, b, r2 = line([x * x for x in logs], med)
        print(f"  log2^2 n   slope {a:9.4f} intercept {b:9.4f} R2 {r2:.3f}")
        if all(m > 0 for m in med):
            a, _, r2 = line([math.log(n) for n in ns], [math.log(m) for m in med])
            print(f"  n^e        e     {a:9.4f} R2 {r2:.3f}")
        fitted += 1
    if fitted == 0:
        print("no series with three or more sizes", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

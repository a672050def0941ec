#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Recompute eval.csv metrics from predictions.csv."""
import csv
import sys


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def metrics(truth, pred):
    n = len(truth)
    mape = 100.0 * sum(abs(p - t) / abs(t) for t, p in zip(truth, pred)) / n
    ss_res = sum((p - t) ** 2 for t, p in zip(truth, pred))
    mean = sum(truth) / n
    ss_tot = sum((t - mean) ** 2 for t in truth)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return {"mape": mape, "mse": ss_res / n, "r2": r2}


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main(run_dir):
    dump = read_rows(f"{run_dir}/predictions.csv")
    failures = 0
    for row in read_rows(f"{run_dir}/eval.csv"):
        o = row["objective"]
        truth = [float(r[o]) for r in dump]
        pred = [float(r["pred_" + o]) for r in dump]
        if int(row["n"]) != len(dump):
            print(f"FAIL {o}.n: {row['n']} vs {len(dump)}")
            failures += 1
        for key, want in metrics(truth, pred).items():
            got = float(row[key])
            if not close(got, want):
                print(f"FAIL {o}.{key}: report {got!r}, recomputed {want!r}")
                failures += 1
    print("eval recomputation:", "FAIL" if failures else "PASS")
    return 1 if failures else 0


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit("usage: recompute_eval.py RUN_DIR")
    sys.exit(main(sys.argv[1]))

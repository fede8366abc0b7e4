"""Compare the compiled scalar core against the pure-Python fallback.

The hot path of the whole artifact is exact small-matrix arithmetic inside
the randomized identity suite, so that is what gets timed: raw scalar
throughput, the 4x4 matrix product kernel, and a slice of the identity
suite over the three bundled carriers.  Each configuration runs in a
subprocess because the core is selected at import time (KCERT_PURE=1
forces the fallback).

Usage: python benchmarks/bench_scalars.py [--samples N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time

from kcert import scalars
from kcert.identities import run_identity_suite
from kcert.instances import suite_algebras

samples = int(sys.argv[1])
out = {"compiled": scalars.COMPILED}

a, b = scalars.rat(3, 7), scalars.rat(-5, 9)
n = 200000
t = time.perf_counter()
acc = scalars.rat(0)
for _ in range(n):
    acc = acc + a * b
out["scalar_mops"] = round(n * 2 / (time.perf_counter() - t) / 1e6, 2)

from kcert.matrices import FilteredMatrix
from kcert.instances import trivial_algebra
alg = trivial_algebra()
m = FilteredMatrix(
    alg, tuple(tuple(scalars.rat(i + j + 1, 3) for j in range(4)) for i in range(4))
)
reps = 5000
t = time.perf_counter()
for _ in range(reps):
    m @ m
out["matmul4_us"] = round((time.perf_counter() - t) / reps * 1e6, 1)

suite = {}
for name, algebra in suite_algebras().items():
    t = time.perf_counter()
    reports = run_identity_suite(algebra, sizes=4, samples=samples, seed=1)
    assert all(r.ok for r in reports)
    suite[name] = round(time.perf_counter() - t, 2)
out["suite_seconds"] = suite
print(json.dumps(out))
"""


def run_config(pure, samples):
    env = dict(os.environ)
    env["KCERT_PURE"] = "1" if pure else "0"
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(samples)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=100,
                        help="identity-suite samples per identity (default 100)")
    args = parser.parse_args()
    compiled = run_config(pure=False, samples=args.samples)
    pure = run_config(pure=True, samples=args.samples)
    if not compiled["compiled"]:
        print("note: compiled core unavailable, both runs use the fallback")
    rows = [
        ("scalar throughput (Mops/s)", compiled["scalar_mops"], pure["scalar_mops"]),
        ("4x4 matmul (us)", compiled["matmul4_us"], pure["matmul4_us"]),
    ]
    for name in compiled["suite_seconds"]:
        rows.append(
            (f"identity suite, {name} (s)",
             compiled["suite_seconds"][name], pure["suite_seconds"][name])
        )
    width = max(len(r[0]) for r in rows)
    print(f"{'benchmark':<{width}}  {'compiled':>10}  {'pure':>10}  {'speedup':>8}")
    for name, fast, slow in rows:
        if "Mops" in name:
            speedup = fast / slow if slow else float("inf")
        else:
            speedup = slow / fast if fast else float("inf")
        print(f"{name:<{width}}  {fast:>10}  {slow:>10}  {speedup:>7.1f}x")


if __name__ == "__main__":
    main()

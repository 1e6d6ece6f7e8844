"""Benchmark the hot simulation kernels: numba path vs pure fallback.

Runs each kernel workload in-process on the active path and, unless
--no-subprocess is given, re-runs the same workloads in a subprocess with
MIXPOISSON_DISABLE_NJIT=1 to time the fallback.  Outputs are checked to be
bit-identical across the two paths (splitmix64 draw streams are shared).

Usage:
    python benchmarks/bench_kernels.py [--reps N] [--no-subprocess]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from mixpoisson.models import edgecut_fm_numeric
from mixpoisson.simulate import kernels_path, mc_counts, mc_values

WORKLOADS = [
    ("records n=500", lambda reps: mc_counts("records", {"n": 500}, 5, reps, 1)),
    ("bridge n=500", lambda reps: mc_counts("bridge", {"n": 500}, 3, reps, 2)),
    ("mapping n=500", lambda reps: mc_counts("mapping", {"n": 500}, 2, reps, 3)),
    ("edgecut n=500", lambda reps: mc_counts("edgecut", {"n": 500}, 3, reps, 4)),
    ("parking n=500", lambda reps: mc_counts("parking", {"n": 500}, 3, reps, 5)),
    ("crp n=500", lambda reps: mc_counts("crp", {"n": 500, "a": "1/2", "theta": "1/2"}, 2, reps, 6)),
    ("triangular n=500", lambda reps: mc_values("triangular", {"n": 500, "w0": 1, "b0": 1, "alpha": 1, "beta": 1}, reps, 7)),
    ("descendants n=500", lambda reps: mc_values("descendants", {"n": 500, "j": 250, "family": "gport", "alpha": 1}, reps, 8)),
]


def run_all(reps: int) -> dict:
    out = {}
    for name, fn in WORKLOADS:
        fn(min(reps, 8))  # warm the JIT so compile time is not measured
        t0 = time.perf_counter()
        result = fn(reps)
        dt = time.perf_counter() - t0
        out[name] = {"seconds": dt, "checksum": int(np.asarray(result).sum())}
    t0 = time.perf_counter()
    val = edgecut_fm_numeric(4000, 1, 1)
    out["edgecut_fm_numeric n=4000"] = {"seconds": time.perf_counter() - t0, "checksum": round(val, 6)}
    return out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--no-subprocess", action="store_true")
    ap.add_argument("--json", action="store_true", help="emit raw JSON (used by the subprocess run)")
    args = ap.parse_args()

    mine = run_all(args.reps)
    if args.json:
        print(json.dumps({"path": kernels_path(), "results": mine}))
        return

    print(f"active path: {kernels_path()}  (replicates per workload: {args.reps})")
    other = None
    if not args.no_subprocess:
        env = dict(os.environ)
        if kernels_path() == "numba":
            env["MIXPOISSON_DISABLE_NJIT"] = "1"
        else:
            env.pop("MIXPOISSON_DISABLE_NJIT", None)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--reps", str(args.reps), "--json"],
            capture_output=True,
            text=True,
            env=env,
        )
        if proc.returncode == 0:
            other = json.loads(proc.stdout)
        else:
            print("  (subprocess comparison failed; showing single-path timings)")

    width = max(len(name) for name in mine)
    header = f"{'workload':<{width}}  {'this path':>10}"
    if other:
        header += f"  {other['path']:>10}  {'speedup':>8}  identical"
    print(header)
    for name, res in mine.items():
        line = f"{name:<{width}}  {res['seconds']:>9.3f}s"
        if other:
            o = other["results"][name]
            ratio = o["seconds"] / res["seconds"] if res["seconds"] > 0 else float("inf")
            same = "yes" if o["checksum"] == res["checksum"] else "NO"
            if name.startswith("edgecut_fm_numeric"):
                same = "~" if abs(o["checksum"] - res["checksum"]) < 1e-5 else "NO"
            line += f"  {o['seconds']:>9.3f}s  {ratio:>7.1f}x  {same:>9}"
        print(line)


if __name__ == "__main__":
    main()

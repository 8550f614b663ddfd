"""Benchmark the compiled kernels against the pure-numpy fallback.

The backend is fixed at import time by the ISO_RICCI_NO_NUMBA environment
variable, so each timing runs in a subprocess with the appropriate setting.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, os, sys, time
import numpy as np
from iso_ricci import kernels
from iso_ricci.model_profiles import evaluate_model, ModelSpec

results = {"backend": kernels.BACKEND}

# squared-profile evolution on the compact domain
n = 1024
a = np.linspace(0.0, 4 * np.pi, n + 1)
v = evaluate_model(ModelSpec("Rosenau", 0), np.clip(a, 1e-12, None), 0.0).value
v[0] = v[-1] = 0.0
h = a[1] - a[0]
kernels.profile_advance(v.copy(), a, h, 0, 1, False, 0.0, 1e-4)  # warm-up/JIT
best = np.inf
for _ in range(REPEAT):
    t0 = time.perf_counter()
    _, steps, ok = kernels.profile_advance(v.copy(), a, h, 0, 1, False,
                                           0.0, 0.02)
    best = min(best, time.perf_counter() - t0)
assert ok
results["profile_advance"] = {"seconds": best, "steps": int(steps)}

# sphere flow in the polar gauge
n = 1024
h = np.pi / n
theta_c = (np.arange(n) + 0.5) * h
sin_c = np.sin(theta_c)
sin_f = np.sin(np.arange(n + 1) * h)
psi = 0.05 * np.cos(theta_c)
kernels.sphere_advance(psi.copy(), sin_c, sin_f, h, 0.0, 1e-5)  # warm-up/JIT
best = np.inf
for _ in range(REPEAT):
    t0 = time.perf_counter()
    _, steps, _, ok = kernels.sphere_advance(psi.copy(), sin_c, sin_f, h,
                                             0.0, 0.005)
    best = min(best, time.perf_counter() - t0)
assert ok
results["sphere_advance"] = {"seconds": best, "steps": int(steps)}
print(json.dumps(results))
"""


def run_backend(no_numba: bool, repeat: int) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["ISO_RICCI_NO_NUMBA"] = "1"
    else:
        env.pop("ISO_RICCI_NO_NUMBA", None)
    code = WORKER.replace("REPEAT", str(repeat))
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repetitions (best is reported)")
    args = parser.parse_args()

    rows = [run_backend(no_numba=False, repeat=args.repeat),
            run_backend(no_numba=True, repeat=args.repeat)]
    kernels_list = ["profile_advance", "sphere_advance"]
    print(f"{'kernel':<18} {'backend':<8} {'steps':>8} {'seconds':>10} "
          f"{'us/step':>9} {'speedup':>8}")
    for kname in kernels_list:
        base = rows[1][kname]["seconds"]
        for r in rows:
            entry = r[kname]
            us = 1e6 * entry["seconds"] / max(entry["steps"], 1)
            speedup = base / entry["seconds"]
            print(f"{kname:<18} {r['backend']:<8} {entry['steps']:>8} "
                  f"{entry['seconds']:>10.4f} {us:>9.2f} {speedup:>7.1f}x")


if __name__ == "__main__":
    main()

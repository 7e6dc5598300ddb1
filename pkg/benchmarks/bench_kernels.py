"""Time the hot kernels on the numba path and on the pure-Python path.

Usage: python benchmarks/bench_kernels.py [--repeat 5]

Each path runs in its own interpreter; the Python one has
MALAB_DISABLE_NUMBA=1 set so every kernel (including helpers called from
other kernels) is interpreted.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from malab import kernels
from malab._accel import NUMBA_ENABLED
from malab.problem import ProblemSpec


def cases():
    par = ProblemSpec(2, 1).params
    grid = np.linspace(1.0, 100.0, 400)[1:]
    solve_args = (kernels.RADIAL, par, 1.0, 1 / 48, 4 / 48, grid, 0, np.array([np.inf]),
                  1e-12, 1e-14, np.inf, 1e-14, 0.0)
    x = np.geomspace(1e-3, 100.0, 4000)
    y = x**4 / 48
    return {
        "solve radial r in [1, 100]": (kernels.solve, solve_args),
        "stencil_derivatives 4000 pts": (kernels.stencil_derivatives, (x, y, 5)),
    }


def best_of(func, args, repeat):
    func(*args)  # compile / warm up
    return min(timeit.repeat(lambda: func(*args), number=1, repeat=repeat))


def measure(repeat):
    return {name: best_of(func, fargs, repeat) for name, (func, fargs) in cases().items()}


def run_path(disable, repeat):
    env = dict(os.environ, MALAB_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps({"numba": NUMBA_ENABLED, "times": measure(args.repeat)}))
        return
    fast = run_path(False, args.repeat)
    slow = run_path(True, args.repeat)
    if not fast["numba"]:
        print("warning: numba unavailable, both columns are interpreted")
    print(f"{'kernel':32s} {'numba [s]':>12s} {'python [s]':>12s} {'speedup':>9s}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:32s} {t_fast:12.3e} {t_slow:12.3e} {t_slow / t_fast:9.1f}")


if __name__ == "__main__":
    main()

"""Compiled kernels against the pure-Python fallback.

Times every kernel on identical inputs for both backends, checks that the
outputs agree, then times a short new-sampler chain with each backend in a
subprocess (the backend is fixed at import).

    python3 benchmarks/bench_kernels.py [--repeat 5] [--iters 300]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from epimc import _kernels_py
from epimc.likelihood import SirParams, sir_intensity_x
from epimc.paths import InitialState
from epimc.simulate import RngStream, gillespie_sir

try:
    from epimc import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

CHAIN = """
import time
from epimc import BACKEND
from epimc.observation import FullPath, Observation
from epimc.likelihood import SirParams
from epimc.paths import InitialState
from epimc.samplers import NewSamplerConfig, Problem, SIRModel, run_new_chain
from epimc.simulate import RngStream, gillespie_sir
init = InitialState.sir(1_000_000, 100)
x, y = gillespie_sir(init, SirParams(0.2, 0.2), 10.0, RngStream(2074, 0))
prob = Problem(SIRModel(init), Observation(init, 10.0, {"y": FullPath(y)}),
               fixed={"beta": 0.2, "gamma": 0.2}, init_counts={"x": (100, 300)})
t = time.perf_counter()
run_new_chain(prob, NewSamplerConfig(iters=%d), RngStream(0, 1))
print(BACKEND, time.perf_counter() - t)
"""


def inputs():
    init = InitialState.sir(1_000_000, 100)
    x, y = gillespie_sir(init, SirParams(0.2, 0.2), 10.0, RngStream(2074, 0))
    spec = sir_intensity_x(y.times, init, 0.2, (0.0, 10.0))
    u = RngStream(1).generator().standard_exponential(x.n + 1)
    return {
        "sir_sweep": (x.times, y.times, init.S0, init.I0, 0.0, 10.0),
        "birth_loglik": (x.times, *spec.args),
        "path_to_coords": (x.times, *spec.args),
        "coords_to_path": (u, *spec.args),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(p, q) for p, q in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=1e-12)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--iters", type=int, default=300)
    args = ap.parse_args()
    if _kernels_c is None:
        sys.exit("compiled extension not built; run pip install -e . --no-build-isolation")
    print(f"{'kernel':16s} {'python [us]':>12s} {'cython [us]':>12s} {'speed-up':>9s}  agree")
    for name, a in inputs().items():
        fp, fc = getattr(_kernels_py, name), getattr(_kernels_c, name)
        n = 20
        tp = min(timeit.repeat(lambda: fp(*a), number=n, repeat=args.repeat)) / n * 1e6
        tc = min(timeit.repeat(lambda: fc(*a), number=n, repeat=args.repeat)) / n * 1e6
        print(f"{name:16s} {tp:12.1f} {tc:12.1f} {tp / tc:9.1f}  {same(fp(*a), fc(*a))}")
    print()
    for pure in ("0", "1"):
        env = dict(os.environ, EPIMC_PURE_PYTHON=pure)
        r = subprocess.run([sys.executable, "-c", CHAIN % args.iters], env=env, capture_output=True, text=True,
                           check=True)
        backend, secs = r.stdout.split()
        print(f"new sampler, {args.iters} iterations, {backend:6s}: {float(secs):.2f} s")


if __name__ == "__main__":
    main()

"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--particles N] [--steps T] [--repeat R]
"""

import argparse
import math
import time

import numpy as np

from qratchet import _backend, quantum
from qratchet.classical import ensemble_evolve, make_ensemble
from qratchet.params import ScaledParams


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_classical(backend, n, steps, repeat):
    params = ScaledParams(3.0, 1.0, 1.0, math.pi / 2)
    e = make_ensemble(n, seed=1)
    return best_of(lambda: ensemble_evolve(e, params, steps=steps, backend=backend), repeat)


def bench_phase_kernels(backend, n_basis, calls, repeat):
    rng = np.random.default_rng(0)
    c = rng.normal(size=n_basis) + 1j * rng.normal(size=n_basis)
    ph = np.exp(1j * rng.uniform(0, 2 * np.pi, n_basis))
    w = rng.normal(size=n_basis)

    def run():
        for _ in range(calls):
            backend.mul_inplace(c, ph)
            backend.mul_moment(c, ph, w)

    return best_of(run, repeat)


def bench_quantum(backend, steps, repeat):
    saved = quantum.kernels
    quantum.kernels = backend
    try:
        params = ScaledParams(3.0, 1.0, 1.0, math.pi / 2)
        return best_of(lambda: quantum.evolve(params, steps=steps, basis_size=16384), repeat)
    finally:
        quantum.kernels = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--particles", type=int, default=10**5)
    ap.add_argument("--steps", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = {"fallback": _backend.fallback}
    if _backend.compiled is not None:
        backends["compiled"] = _backend.compiled
    else:
        print("compiled extension not built; timing the fallback only")

    rows = []
    for name, b in backends.items():
        rows.append((name, "classical ensemble", bench_classical(b, args.particles, args.steps, args.repeat)))
        rows.append((name, "phase kernels N=65536 x200", bench_phase_kernels(b, 65536, 200, args.repeat)))
        rows.append((name, "quantum evolve N=16384", bench_quantum(b, args.steps, args.repeat)))

    print(f"{'backend':<10} {'workload':<28} {'seconds':>9}")
    for name, what, sec in rows:
        print(f"{name:<10} {what:<28} {sec:9.3f}")
    if "compiled" in backends:
        base = {what: sec for name, what, sec in rows if name == "fallback"}
        for name, what, sec in rows:
            if name == "compiled":
                print(f"speedup {what}: {base[what] / sec:.2f}x")


if __name__ == "__main__":
    main()

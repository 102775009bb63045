"""Benchmark the compiled kernel extension against the pure-Python fallback.

Both implementations are imported directly (the compiled one is skipped with
a notice if the extension is not built), so a single process compares them
on identical inputs: the Hermitian eigensolver, the Schrodinger right-hand
side, and the expectation value, across a few matrix dimensions, plus an
end-to-end closed-loop propagation.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time
import timeit

import numpy as np

from lyapctrl import linalg
from lyapctrl.control import SchemeAConfig
from lyapctrl.eigenpath import frame_at
from lyapctrl.kernels import _pure
from lyapctrl.models import fig1_model
from lyapctrl.propagate import IntegratorConfig, propagate

try:
    from lyapctrl.kernels import _speedups
except ImportError:
    _speedups = None


def random_problem(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = np.ascontiguousarray((a + a.conj().T) / 2)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return h, np.ascontiguousarray(psi / np.linalg.norm(psi))


def bench_kernel(name, fn_pure, fn_fast, args, repeats):
    n = 2000
    t_pure = min(timeit.repeat(lambda: fn_pure(*args), number=n,
                               repeat=repeats)) / n
    if fn_fast is None:
        print(f"  {name:16s} pure {t_pure * 1e6:8.2f} us   compiled: not built")
        return
    t_fast = min(timeit.repeat(lambda: fn_fast(*args), number=n,
                               repeat=repeats)) / n
    print(f"  {name:16s} pure {t_pure * 1e6:8.2f} us   "
          f"compiled {t_fast * 1e6:8.2f} us   speedup {t_pure / t_fast:5.2f}x")


def bench_propagation():
    m = fig1_model()
    psi0 = frame_at(m, 0.0).state(0)
    scheme = SchemeAConfig(x_op=linalg.pauli_combo(1, 0, 12, 0), combined=True,
                           sign=1)
    cfg = IntegratorConfig(t0=0.0, t1=3.0, dt=5e-4, record_stride=20)
    start = time.perf_counter()
    propagate(m, scheme, psi0, cfg)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions per kernel (best is kept)")
    args = parser.parse_args()

    rng = np.random.default_rng(20260823)
    print("kernel micro-benchmarks (per call, best of "
          f"{args.repeats} x 2000):")
    for dim in (2, 4, 8):
        h, psi = random_problem(rng, dim)
        fast = _speedups if _speedups is not None else None
        print(f"dim = {dim}:")
        bench_kernel("eigh_herm", _pure.eigh_herm,
                     fast.eigh_herm if fast else None, (h,), args.repeats)
        bench_kernel("schrodinger_rhs", _pure.schrodinger_rhs,
                     fast.schrodinger_rhs if fast else None, (h, psi),
                     args.repeats)
        bench_kernel("expect", _pure.expect,
                     fast.expect if fast else None, (h, psi), args.repeats)

    from lyapctrl.kernels import BACKEND

    wall = bench_propagation()
    print(f"\nend-to-end feedback run (6000 steps, backend={BACKEND}): "
          f"{wall:.2f} s")
    print("rerun with LYAPCTRL_PURE_PYTHON=1 to time the fallback end to end")


if __name__ == "__main__":
    main()

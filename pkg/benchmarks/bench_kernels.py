"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-N wall time per kernel and backend, and the speedup.
"""
import argparse
import timeit

import numpy as np

from qpt_kg import kernels


def cases():
    x = np.linspace(-1.0, 3.0, 200_000)
    f = np.exp(-np.linspace(0.0, 20.0, 200_000))
    return {
        "jacobi_recurrence n=12, 2e5 points": lambda m: m.jacobi_recurrence(12, 0.4, -1.7, x),
        "second_derivative order 4, 2e5 points": lambda m: m.second_derivative(f, 1e-4, 4),
        "condition_value x 1e4 (nu)": lambda m: [
            m.condition_value(kernels.NU, 1, e, 1.0, 1.0, -2.0, 1.0) for e in np.linspace(-1, 1, 10_000)
        ],
        "level_roots printed, 1e4 scan points": lambda m: m.level_roots(
            kernels.PRINTED, 0, 1.0, 1.0, 10.0, 1.0, 0.9875, 1.0, 10_000, 1e-10
        ),
        "level_roots nu, 1e4 scan points": lambda m: m.level_roots(
            kernels.NU, 2, 1.0, 1.0, -5.0, 1.0, -1.0, 1.0, 10_000, 1e-10
        ),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    mods = kernels.backends()
    if "cython" not in mods:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':42s}" + "".join(f"{name:>12s}" for name in mods) + ("   speedup" if len(mods) > 1 else ""))
    for label, fn in cases().items():
        times = {name: min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) for name, mod in mods.items()}
        row = f"{label:42s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times.values())
        if len(times) > 1:
            row += f"   {times['python'] / times['cython']:7.1f}x"
        print(row)


if __name__ == "__main__":
    main()

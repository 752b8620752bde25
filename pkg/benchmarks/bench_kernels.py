"""Compare the compiled kernels with the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--reps N]
"""
import argparse
import time

import numpy as np

from choi_gauge import _pykernels
from choi_gauge.bases import product_basis
from choi_gauge.campaign import draw_rounds
from choi_gauge.channels import ChannelModel, probability_table

try:
    from choi_gauge import _core
except ImportError:
    _core = None


def best_of(func, repeat=3):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=2000, help="protocol repetitions per batch")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    mats = []
    for n in (4, 16):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        mats.append((n, 0.5 * (a + a.conj().T)))

    probs = probability_table(ChannelModel("detuned", 0.25))
    rounds = [draw_rounds(probs, 250, 1, r) for r in range(args.reps)]
    ones1 = np.array([a for a, _ in rounds])
    ones2 = np.array([b for _, b in rounds])
    _, duals = product_basis(True)

    backends = [("python", _pykernels)] + ([("cython", _core)] if _core else [])
    rows = []
    for name, mod in backends:
        for n, a in mats:
            t = best_of(lambda: [mod.jacobi_eigh(a) for _ in range(200)]) / 200
            rows.append((name, f"jacobi_eigh n={n}", t))
        t = best_of(lambda: mod.two_round_batch(ones1, ones2, 250, duals), repeat=2)
        rows.append((name, f"two_round_batch reps={args.reps}", t))

    print(f"{'backend':8s} {'kernel':32s} {'seconds':>12s}")
    for name, kernel, t in rows:
        print(f"{name:8s} {kernel:32s} {t:12.3e}")
    if _core:
        half = len(rows) // 2
        print()
        for (_, kernel, tp), (_, _, tc) in zip(rows[:half], rows[half:]):
            print(f"speedup {kernel:32s} {tp / tc:8.1f}x")
    else:
        print("compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()

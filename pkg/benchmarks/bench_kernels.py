"""Time the compiled kernels against the numpy fallback.

Runs both implementations in the same process, so one invocation gives a
direct comparison.  The end-to-end blend row uses whichever backend the
package selected at import; rerun with ``SETBLEND_NO_EXT=1`` to see the
full pipeline on the fallback.

Usage::

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 64 256 1024 --repeats 5
"""

import argparse
import time

import numpy as np

from setblend import _kernels_py
from setblend.fixtures import random_pair
from setblend.kernels import backend
from setblend.measure_average import general_average

try:
    from setblend import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _row(label: str, numpy_s: float, compiled_s: float | None) -> str:
    if compiled_s is None:
        return f"{label:<28} {numpy_s * 1e3:>10.2f} {'-':>10} {'-':>8}"
    return (
        f"{label:<28} {numpy_s * 1e3:>10.2f} {compiled_s * 1e3:>10.2f}"
        f" {numpy_s / compiled_s:>7.1f}x"
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--sizes", type=int, nargs="+", default=[64, 128, 256, 512, 1024]
    )
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"active backend: {backend()}")
    if _kernels is None:
        print("compiled extension not importable; timing the fallback only")
    print(f"{'kernel / size':<28} {'numpy ms':>10} {'compiled':>10} {'speedup':>8}")

    for n in args.sizes:
        bits = rng.random((n, n)) < 0.4
        py = _time(lambda: _kernels_py.edt_sq(bits), args.repeats)
        cy = None if _kernels is None else _time(
            lambda: _kernels.edt_sq(bits), args.repeats
        )
        print(_row(f"edt_sq {n}x{n}", py, cy))
        py = _time(lambda: _kernels_py.label_components(bits, True), args.repeats)
        cy = None if _kernels is None else _time(
            lambda: _kernels.label_components(bits, True), args.repeats
        )
        print(_row(f"label_components {n}x{n}", py, cy))

    for n in (64, 256):
        a, b = random_pair(rng, "general", (n, n))
        best = _time(lambda: general_average(a, b, 0.5), args.repeats)
        print(f"{f'general_average {n}x{n}':<28} {best * 1e3:>10.2f} ms on {backend()}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

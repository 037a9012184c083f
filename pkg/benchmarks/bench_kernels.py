"""
Numba vs pure-numpy timings for the hot kernels.

Compares the two implementations of direct circular convolution and of the
order-3 contraction, and shows the FFT convolution for reference.  Results
are checked for bit-identity before anything is timed.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --dims 256,1024 --repeats 9
"""

import argparse
import time

import numpy as np

from holosem import _kernels
from holosem.core import circ_conv_fft, make_rng


def median_time(fn, *args, repeats=5):
    fn(*args)  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench_conv(dims, repeats):
    print(f"{'dim':>6}  {'numpy':>10}  {'numba':>10}  {'fft':>10}  {'speedup':>8}")
    for d in dims:
        rng = make_rng(d)
        a, b = rng.standard_normal(d), rng.standard_normal(d)
        slow = _kernels.circ_conv_direct_numpy
        fast = _kernels.circ_conv_direct_numba
        if fast is not None and not np.array_equal(slow(a, b), fast(a, b)):
            raise SystemExit(f"numba and numpy convolution differ at dim {d}")
        t_np = median_time(slow, a, b, repeats=repeats)
        t_nb = median_time(fast, a, b, repeats=repeats) if fast is not None else float("nan")
        t_fft = median_time(circ_conv_fft, a, b, repeats=repeats)
        print(f"{d:>6}  {t_np:>10.2e}  {t_nb:>10.2e}  {t_fft:>10.2e}  {t_np / t_nb:>7.1f}x")


def bench_contract3(sizes, repeats):
    print(f"{'n':>6}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for n in sizes:
        rng = make_rng(n)
        t = rng.standard_normal((n, n, n))
        left, right = rng.standard_normal(n), rng.standard_normal(n)
        slow = _kernels.contract3_both_numpy
        fast = _kernels.contract3_both_numba
        if fast is not None and not np.array_equal(slow(t, left, right), fast(t, left, right)):
            raise SystemExit(f"numba and numpy contraction differ at n {n}")
        t_np = median_time(slow, t, left, right, repeats=repeats)
        t_nb = median_time(fast, t, left, right, repeats=repeats) if fast is not None else float("nan")
        print(f"{n:>6}  {t_np:>10.2e}  {t_nb:>10.2e}  {t_np / t_nb:>7.1f}x")


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--dims", default="64,256,1024,4096")
    p.add_argument("--sizes", default="8,32,64,128")
    p.add_argument("--repeats", type=int, default=5)
    args = p.parse_args()
    if not _kernels.NUMBA_AVAILABLE:
        print("numba is not installed; only numpy timings are meaningful")
    print("direct circular convolution (seconds, median)")
    bench_conv([int(x) for x in args.dims.split(",")], args.repeats)
    print()
    print("order-3 contraction s_j = sum_ik t_ijk l_i r_k (seconds, median)")
    bench_contract3([int(x) for x in args.sizes.split(",")], args.repeats)


if __name__ == "__main__":
    main()

"""Time the compiled U-scan kernel against its pure-Python twin.

    python benchmarks/bench_kernels.py [--bounds 100 300 1000] [--repeat 3]

Both backends must return identical candidate lists; the script exits
non-zero if they do not.
"""
import argparse
import sys
import time

from powerorbits import _kernels_py, kernels
from powerorbits.dynamics import Poly

CASES = [("X^3-X^2+1", []), ("(1/6)X^3+5", [2, 3]), ("2X^2(X^2-1)", [2])]


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bounds", type=int, nargs="+", default=[100, 300, 1000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if kernels._compiled is None:
        print("compiled kernel not available; build with `pip install -e . --no-build-isolation`")
        return 1

    print(f"{'polynomial':<14} {'S':<6} {'B':>6} {'python s':>10} {'cython s':>10} {'speedup':>8} {'kept':>7}")
    ok = True
    for text, S in CASES:
        coeffs, L = Poly.parse(text).integer_form()
        for B in args.bounds:
            if not kernels.fits_int64(coeffs, L, B):
                print(f"{text:<14} {','.join(map(str, S)):<6} {B:>6}  (outside the 64-bit range, skipped)")
                continue
            t_py, out_py = best_of(lambda: _kernels_py.scan_u_chunk(coeffs, L, S, 1, B + 1, B), args.repeat)
            t_c, out_c = best_of(lambda: kernels._compiled.scan_u_chunk(coeffs, L, S, 1, B + 1, B), args.repeat)
            ok &= out_py == out_c
            print(f"{text:<14} {','.join(map(str, S)):<6} {B:>6} {t_py:>10.3f} {t_c:>10.3f} "
                  f"{t_py / t_c:>7.1f}x {len(out_c):>7}")
    if not ok:
        print("MISMATCH between backends")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

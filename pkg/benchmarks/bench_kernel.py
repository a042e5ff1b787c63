"""Compare the compiled coefficient kernel against the pure-Python fallback.

Times the two hot primitives (series product, series inverse) on the raw
numerator/denominator vectors both backends share, then an end-to-end
workload (embedding a rank-3 presentation and recovering its invariants)
in subprocesses so each run binds its backend at import.

Usage: python3 benchmarks/bench_kernel.py [--prec N] [--repeat N]
"""

import argparse
import os
import statistics
import subprocess
import sys
import time
from fractions import Fraction


def sample_vectors(prec, seed=7):
    import random

    rng = random.Random(seed)
    xs = [Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(prec)]
    ys = [Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(prec)]
    ys[0] = Fraction(1)  # invertible
    return ([f.numerator for f in xs], [f.denominator for f in xs],
            [f.numerator for f in ys], [f.denominator for f in ys])


def time_call(fn, repeat):
    best = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best.append(time.perf_counter() - t0)
    return statistics.median(best)


def bench_kernels(prec, repeat):
    from themelab import _kernel_py

    kernels = [("python", _kernel_py)]
    try:
        from themelab import _kernel_c

        kernels.append(("compiled", _kernel_c))
    except ImportError:
        print("compiled kernel not built; timing the fallback only")

    an, ad, bn, bd = sample_vectors(prec)
    rows = []
    for name, mod in kernels:
        t_mul = time_call(lambda: mod.v_mul(an, ad, bn, bd, prec), repeat)
        t_inv = time_call(lambda: mod.v_invert(bn, bd, prec), repeat)
        rows.append((name, t_mul, t_inv))
    return rows


END_TO_END = """
import time
from fractions import Fraction
from themelab import TruncSeries
from themelab.themes import (ThemePresentation, bernstein_from_generator,
                             embed_into_xi, invariants_from_bernstein)
E = ThemePresentation(3, [1, 1],
                      [TruncSeries([1, 2, 5], {prec}), TruncSeries([1, 2], {prec})])
t0 = time.perf_counter()
for _ in range({loops}):
    phi = embed_into_xi(E)
    _, op = bernstein_from_generator(phi, 3)
    assert invariants_from_bernstein(op, Fraction(1)).p == (1, 1)
print(time.perf_counter() - t0)
"""


def bench_end_to_end(prec, loops):
    out = []
    for name, pure in (("python", "1"), ("compiled", "")):
        env = dict(os.environ, THEMELAB_PURE=pure)
        code = END_TO_END.format(prec=prec, loops=loops)
        run = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        out.append((name, float(run.stdout.strip())))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--prec", type=int, default=128,
                    help="vector length for the kernel primitives")
    ap.add_argument("--repeat", type=int, default=25)
    ap.add_argument("--loops", type=int, default=20,
                    help="iterations of the end-to-end workload")
    args = ap.parse_args()

    print(f"kernel primitives at prec {args.prec} "
          f"(median of {args.repeat} runs)")
    rows = bench_kernels(args.prec, args.repeat)
    for name, t_mul, t_inv in rows:
        print(f"  {name:>8}:  v_mul {t_mul * 1e3:8.3f} ms   "
              f"v_invert {t_inv * 1e3:8.3f} ms")
    if len(rows) == 2:
        print(f"  speedup:   v_mul {rows[0][1] / rows[1][1]:8.2f} x    "
              f"v_invert {rows[0][2] / rows[1][2]:8.2f} x")

    print(f"end-to-end embed/classify loop at prec 32 x{args.loops}")
    ends = bench_end_to_end(32, args.loops)
    for name, t in ends:
        print(f"  {name:>8}:  {t * 1e3:8.1f} ms")
    if len(ends) == 2 and ends[1][1] > 0:
        print(f"  speedup:   {ends[0][1] / ends[1][1]:8.2f} x")


if __name__ == "__main__":
    main()

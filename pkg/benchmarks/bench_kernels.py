"""Compare the numba and numpy kernel backends on the batched hot loops.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--batch 20000]

Both backends are checked to return identical arrays before timing.
"""

import argparse
import time

import numpy as np

from operlab import _kernels
from operlab.rings import field


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pcurvature(p, d, n, batch, repeat):
    F = field(p, d)
    tables = F.numpy_tables()
    rng = np.random.default_rng(0)
    mats = rng.integers(0, F.q, size=(batch, n, n))
    ref = _kernels.batched_pcurvature(mats, p, 1, tables, "numpy")
    row = {"kernel": f"p-curvature GF({p}^{d}) n={n}", "batch": batch}
    for which in ("numpy", "numba"):
        if which == "numba" and not _kernels.HAVE_NUMBA:
            continue
        out = _kernels.batched_pcurvature(mats, p, 1, tables, which)  # warm-up / compile
        assert np.array_equal(out, ref)
        row[which] = best_of(lambda: _kernels.batched_pcurvature(mats, p, 1, tables, which), repeat)
    return row


def bench_lucas(p, N, batch, repeat):
    ks = np.arange(-batch, batch + 1, dtype=np.int64)
    ref = _kernels.lucas_digit_grid(ks, 3, p, N, "numpy")
    row = {"kernel": f"Lucas digit grid p={p} N={N}", "batch": ks.shape[0]}
    for which in ("numpy", "numba"):
        if which == "numba" and not _kernels.HAVE_NUMBA:
            continue
        assert np.array_equal(_kernels.lucas_digit_grid(ks, 3, p, N, which), ref)
        row[which] = best_of(lambda: _kernels.lucas_digit_grid(ks, 3, p, N, which), repeat)
    return row


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--batch", type=int, default=20000)
    args = ap.parse_args(argv)
    rows = [
        bench_pcurvature(5, 2, 2, args.batch, args.repeat),
        bench_pcurvature(7, 2, 3, args.batch, args.repeat),
        bench_pcurvature(13, 2, 3, args.batch, args.repeat),
        bench_lucas(5, 3, args.batch * 10, args.repeat),
    ]
    print(f"{'kernel':34s} {'batch':>8s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for r in rows:
        nb = r.get("numba")
        speed = f"{r['numpy'] / nb:7.1f}x" if nb else "    n/a"
        nb_txt = f"{nb * 1e3:11.2f}" if nb else "        n/a"
        print(f"{r['kernel']:34s} {r['batch']:8d} {r['numpy'] * 1e3:11.2f} {nb_txt} {speed}")


if __name__ == "__main__":
    main()

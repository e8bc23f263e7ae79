"""Compare the numba and pure-numpy flavours of the hot kernels.

Run:  python3 benchmarks/bench_kernels.py
(ATOMIQUE_NO_NUMBA=1 makes the package fall back to numpy everywhere; this
script times both flavours directly regardless of the flag.)
"""

import time

import numpy as np

from atomique.kernels import (
    HAS_NUMBA,
    _kcut_exhaustive_numpy,
    _separation_scan_numpy,
    warm_up,
)

if HAS_NUMBA:
    from atomique.kernels import _kcut_exhaustive_numba, _separation_scan_numba


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_scan(n_atoms=2000, seed=0):
    rng = np.random.default_rng(seed)
    pos = rng.uniform(0, 600, size=(n_atoms, 2))
    partner = np.full(n_atoms, -1, np.int64)
    for i in range(0, 40, 2):
        partner[i], partner[i + 1] = i + 1, i
    t_np, out_np = timeit(_separation_scan_numpy, pos, partner, 2.5, 6.25)
    print(f"separation_scan  numpy  n={n_atoms}: {t_np * 1e3:8.2f} ms "
          f"({out_np[0].shape[0]} findings)")
    if HAS_NUMBA:
        t_nb, out_nb = timeit(_separation_scan_numba, pos, partner, 2.5, 6.25)
        assert all(np.array_equal(a, b) for a, b in zip(out_np, out_nb))
        print(f"separation_scan  numba  n={n_atoms}: {t_nb * 1e3:8.2f} ms "
              f"(speedup {t_np / t_nb:.1f}x, identical output)")


def bench_kcut(n=11, k=3, seed=1):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0, 1, size=(n, n))
    w = np.triu(w, 1)
    w = w + w.T
    t_np, out_np = timeit(_kcut_exhaustive_numpy, w, k, repeat=3)
    print(f"kcut_exhaustive  numpy  n={n} k={k}: {t_np * 1e3:8.2f} ms "
          f"(best {out_np[0]:.4f})")
    if HAS_NUMBA:
        t_nb, out_nb = timeit(_kcut_exhaustive_numba, w, k, repeat=3)
        assert abs(out_np[0] - out_nb[0]) < 1e-9
        assert np.array_equal(out_np[1], out_nb[1])
        print(f"kcut_exhaustive  numba  n={n} k={k}: {t_nb * 1e3:8.2f} ms "
              f"(speedup {t_np / t_nb:.1f}x, identical output)")


if __name__ == "__main__":
    if HAS_NUMBA:
        print("warming up JIT...")
        warm_up()
        _separation_scan_numba(np.zeros((2, 2)) + [[0, 0], [100, 0]],
                               np.full(2, -1, np.int64), 2.5, 6.25)
        _kcut_exhaustive_numba(np.ones((3, 3)), 3)
    else:
        print("numba not installed; timing the numpy flavour only")
    bench_scan()
    bench_kcut()

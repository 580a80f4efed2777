"""Timing comparison of the numba kernels against the numpy fallback.

Run with:  python benchmarks/bench_kernels.py
Force the fallback everywhere in the package with NETCTRL_PURE_NUMPY=1
(this script always times both implementations in-process).
"""

import time

import numpy as np

from netctrl import _kernels


def timeit(fn, *args, repeat=20):
    fn(*args)  # warm-up (includes JIT compile for the numba path)
    t0 = time.perf_counter()
    for _ in range(repeat):
        out = fn(*args)
    return (time.perf_counter() - t0) / repeat, out


def main():
    rng = np.random.default_rng(0)
    n = 200
    lam = np.sort(rng.uniform(-5, 1.4, n))
    ph = rng.standard_normal(n)
    ph /= np.linalg.norm(ph)

    print(f"active backend: {_kernels.BACKEND}")
    rows = []

    t_np, ref = timeit(_kernels.f_matrix_numpy, lam, 1.0)
    if _kernels.f_matrix_numba is not None:
        t_nb, out = timeit(_kernels.f_matrix_numba, lam, 1.0)
        assert np.allclose(out, ref, rtol=1e-12)
        rows.append(("f_matrix (n=200)", t_np, t_nb))
    else:
        rows.append(("f_matrix (n=200)", t_np, None))

    t_np, ref = timeit(_kernels.one_driver_traces_numpy, ph, lam, 1.0)
    if _kernels.one_driver_traces_numba is not None:
        t_nb, out = timeit(_kernels.one_driver_traces_numba, ph, lam, 1.0)
        assert np.allclose(out, ref, rtol=1e-10)
        rows.append(("one_driver_traces (n=200)", t_np, t_nb))
    else:
        rows.append(("one_driver_traces (n=200)", t_np, None))

    n2, steps = 30, 4096
    a = rng.standard_normal((n2, n2))
    a = (a + a.T) / 2 - 3.0 * np.eye(n2)
    drivers = np.array([0, 5, 11], dtype=np.int64)
    u_nodes = rng.standard_normal((2 * steps + 1, 3))
    t_np, ref = timeit(_kernels.rk4_energy_numpy, a, drivers, u_nodes, 2.0, steps, repeat=5)
    if _kernels.rk4_energy_numba is not None:
        t_nb, out = timeit(_kernels.rk4_energy_numba, a, drivers, u_nodes, 2.0, steps, repeat=5)
        assert np.allclose(out[0], ref[0], rtol=1e-10) and abs(out[1] - ref[1]) < 1e-10 * abs(ref[1])
        rows.append(("rk4_energy (n=30, 4096 steps)", t_np, t_nb))
    else:
        rows.append(("rk4_energy (n=30, 4096 steps)", t_np, None))

    print(f"{'kernel':34s} {'numpy':>12s} {'numba':>12s} {'speedup':>9s}")
    for name, t_np, t_nb in rows:
        if t_nb is None:
            print(f"{name:34s} {t_np * 1e3:10.3f} ms {'n/a':>12s}")
        else:
            print(f"{name:34s} {t_np * 1e3:10.3f} ms {t_nb * 1e3:10.3f} ms {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()

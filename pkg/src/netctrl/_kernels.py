"""Hot numeric kernels: numba-compiled loops with a pure-numpy fallback.

The backend is chosen at import time.  Setting ``NETCTRL_PURE_NUMPY=1``
in the environment forces the vectorized numpy implementations; otherwise
numba is used when importable.  Both implementations are kept importable
(``*_numba`` / ``*_numpy``) so the benchmark suite can compare them
in-process.  ``BACKEND`` records which one is active.

All kernels assume pre-validated inputs (finite, in range); argument
checking lives in the public modules that wrap them.
"""

import math
import os

import numpy as np

# Series branch for (e^(s*tf) - 1)/s when |s*tf| is below this; the closed
# form loses ~8 digits to cancellation under the switch.
F_SERIES_SWITCH = 1e-4

# Linear-domain exponent cap: entries with (lam_i+lam_j)*tf above this are
# only handled by the log-domain / high-precision paths.
OVERFLOW_CAP = 300.0

# Trace computations square (and fourth-power) matrix entries, so the
# linear-domain trace path needs a stricter exponent cap.
TRACE_LINEAR_CAP = 150.0


def _use_pure_numpy() -> bool:
    return os.environ.get("NETCTRL_PURE_NUMPY", "").strip() not in ("", "0")


# -- pure-numpy implementations ------------------------------------------


def f_matrix_numpy(lambdas: np.ndarray, tf: float) -> np.ndarray:
    """Pairwise integral factors (e^((li+lj)*tf) - 1)/(li+lj)."""
    s = lambdas[:, None] + lambdas[None, :]
    x = s * tf
    small = np.abs(x) < F_SERIES_SWITCH
    # exact branch; dummy denominator where the series applies
    safe = np.where(small, 1.0, s)
    exact = np.expm1(x) / safe
    series = tf * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0)
    return np.where(small, series, exact)


def one_driver_traces_numpy(ph: np.ndarray, lambdas: np.ndarray, tf: float):
    """Closed-form traces of the second and fourth Gramian powers, d=1.

    ``ph`` is the driver's row of the eigenvector matrix.  Evaluates the
    double/triple sums over eigenvalue pairs directly; equals
    trace(M^2), trace(M^4) of the materialized M up to rounding.
    """
    f = f_matrix_numpy(lambdas, tf)
    w = ph * ph
    alpha = w @ (f * f) @ w
    # inner(i,l) = sum_k w_k f_ki f_kl, then beta = sum_il w_i w_l inner^2
    g2 = f.T @ (w[:, None] * f)
    beta = w @ (g2 * g2) @ w
    return float(alpha), float(beta)


def rk4_energy_numpy(a, drivers, u_nodes, tf, steps):
    """Integrate x' = Ax + Bu on [0, tf] from x=0; RK4 with fixed step.

    ``u_nodes`` holds the input evaluated on the half-step grid,
    shape (2*steps+1, d).  Returns the final state and the Simpson
    quadrature of ||u||^2 over the same grid.
    """
    n = a.shape[0]
    h = tf / steps
    x = np.zeros(n)
    for k in range(steps):
        u0 = u_nodes[2 * k]
        um = u_nodes[2 * k + 1]
        u1 = u_nodes[2 * k + 2]
        k1 = a @ x
        k1[drivers] += u0
        xt = x + 0.5 * h * k1
        k2 = a @ xt
        k2[drivers] += um
        xt = x + 0.5 * h * k2
        k3 = a @ xt
        k3[drivers] += um
        xt = x + h * k3
        k4 = a @ xt
        k4[drivers] += u1
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    usq = np.sum(u_nodes * u_nodes, axis=1)
    energy = _simpson_uniform(usq, 0.5 * h)
    return x, float(energy)


def _simpson_uniform(values: np.ndarray, step: float) -> float:
    m = values.size
    if m % 2 == 0:
        raise ValueError("Simpson rule needs an odd number of nodes")
    return (step / 3.0) * (
        values[0] + values[-1] + 4.0 * values[1:-1:2].sum() + 2.0 * values[2:-2:2].sum()
    )


# -- numba implementations -------------------------------------------------

_HAVE_NUMBA = False
f_matrix_numba = None
one_driver_traces_numba = None
rk4_energy_numba = None

if not _use_pure_numpy():
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        _HAVE_NUMBA = False

if _HAVE_NUMBA:

    @njit(cache=True)
    def _f_scalar(s, tf):
        x = s * tf
        if abs(x) < F_SERIES_SWITCH:
            return tf * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0)
        return math.expm1(x) / s

    @njit(cache=True)
    def f_matrix_numba(lambdas, tf):  # noqa: F811
        n = lambdas.size
        out = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                v = _f_scalar(lambdas[i] + lambdas[j], tf)
                out[i, j] = v
                out[j, i] = v
        return out

    @njit(cache=True)
    def one_driver_traces_numba(ph, lambdas, tf):  # noqa: F811
        n = lambdas.size
        f = np.empty((n, n))
        w = np.empty(n)
        for i in range(n):
            w[i] = ph[i] * ph[i]
            for j in range(i, n):
                v = _f_scalar(lambdas[i] + lambdas[j], tf)
                f[i, j] = v
                f[j, i] = v
        alpha = 0.0
        for k in range(n):
            row = 0.0
            for i in range(n):
                row += w[i] * f[k, i] * f[k, i]
            alpha += w[k] * row
        # g2[i,l] = sum_k w_k f_ki f_kl via symmetric rank-1 updates
        g2 = np.zeros((n, n))
        for k in range(n):
            for i in range(n):
                wfi = w[k] * f[k, i]
                for l in range(i, n):
                    g2[i, l] += wfi * f[k, l]
        beta = 0.0
        for i in range(n):
            beta += w[i] * w[i] * g2[i, i] * g2[i, i]
            acc = 0.0
            for l in range(i + 1, n):
                acc += w[l] * g2[i, l] * g2[i, l]
            beta += 2.0 * w[i] * acc
        return alpha, beta

    @njit(cache=True)
    def rk4_energy_numba(a, drivers, u_nodes, tf, steps):  # noqa: F811
        n = a.shape[0]
        d = drivers.size
        h = tf / steps
        x = np.zeros(n)
        k1 = np.empty(n)
        k2 = np.empty(n)
        k3 = np.empty(n)
        k4 = np.empty(n)
        xt = np.empty(n)
        for k in range(steps):
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += a[i, j] * x[j]
                k1[i] = acc
            for j in range(d):
                k1[drivers[j]] += u_nodes[2 * k, j]
            for i in range(n):
                xt[i] = x[i] + 0.5 * h * k1[i]
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += a[i, j] * xt[j]
                k2[i] = acc
            for j in range(d):
                k2[drivers[j]] += u_nodes[2 * k + 1, j]
            for i in range(n):
                xt[i] = x[i] + 0.5 * h * k2[i]
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += a[i, j] * xt[j]
                k3[i] = acc
            for j in range(d):
                k3[drivers[j]] += u_nodes[2 * k + 1, j]
            for i in range(n):
                xt[i] = x[i] + h * k3[i]
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += a[i, j] * xt[j]
                k4[i] = acc
            for j in range(d):
                k4[drivers[j]] += u_nodes[2 * k + 2, j]
            for i in range(n):
                x[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        m = u_nodes.shape[0]
        s_end = 0.0
        s_odd = 0.0
        s_even = 0.0
        for k in range(m):
            v = 0.0
            for j in range(d):
                v += u_nodes[k, j] * u_nodes[k, j]
            if k == 0 or k == m - 1:
                s_end += v
            elif k % 2 == 1:
                s_odd += v
            else:
                s_even += v
        energy = (0.5 * h / 3.0) * (s_end + 4.0 * s_odd + 2.0 * s_even)
        return x, energy


if _HAVE_NUMBA:
    BACKEND = "numba"
    f_matrix = f_matrix_numba
    one_driver_traces = one_driver_traces_numba
    rk4_energy = rk4_energy_numba
else:
    BACKEND = "numpy"
    f_matrix = f_matrix_numpy
    one_driver_traces = one_driver_traces_numpy
    rk4_energy = rk4_energy_numpy

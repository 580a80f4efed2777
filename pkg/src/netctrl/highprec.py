"""Arbitrary-precision Gramian spectra for cells double precision cannot hold.

Single-driver (and generally d < n) Gramians are spectacularly
ill-conditioned: at small horizons the smallest eigenvalue scales like a
high power of tf (Krylov grading), and at large horizons with positive
adjacency eigenvalues the largest entry grows like e^(2 lam_n tf).  Both
effects routinely push cond(M) past 1e300, far beyond float64.

This module rebuilds M in arbitrary precision (mpmath, gmpy backend) and
returns the natural logs of its eigenvalues as float64, which are always
representable.  Working precision is found with a deterministic ladder:
Cholesky probes at fixed rungs locate the conditioning scale, then the
eigenvalues are computed two rungs of margin above it and checked for
resolution.  The ladder depends only on the cell data, so results are
identical regardless of evaluation order or parallelism.
"""

import numpy as np
from mpmath import mp

from .errors import UncontrollableError

PRECISION_RUNGS = (60, 120, 240, 480, 960, 1920, 3840)

# f-entry series switch; mirrors the double-precision kernel but can be
# much tighter here since expm1 is exact at working precision.
_SERIES_EPS = "1e-30"


def _build_m_mp(lambdas, p_rows, tf, dps):
    """M = (P1^T P1) o F at the given working precision.

    lambdas, p_rows are float64 and treated as exact inputs.
    """
    mp.dps = dps
    n = lambdas.size
    d = p_rows.shape[0]
    lam = [mp.mpf(float(x)) for x in lambdas]
    tfm = mp.mpf(float(tf))
    eps = mp.mpf(_SERIES_EPS)
    rows = [[mp.mpf(float(p_rows[k, i])) for i in range(n)] for k in range(d)]

    f = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = lam[i] + lam[j]
            x = s * tfm
            v = tfm if abs(x) < eps else mp.expm1(x) / s
            f[i][j] = v
            f[j][i] = v

    m = mp.matrix(n, n)
    for i in range(n):
        for j in range(i, n):
            q = mp.mpf(0)
            for k in range(d):
                q += rows[k][i] * rows[k][j]
            v = q * f[i][j]
            m[i, j] = v
            m[j, i] = v
    return m


def _cholesky_passes(m, dps) -> bool:
    mp.dps = dps
    try:
        mp.cholesky(m)
        return True
    except ValueError:
        return False
    except ZeroDivisionError:
        return False


def log_m_spectrum(lambdas: np.ndarray, p_rows: np.ndarray, tf: float) -> np.ndarray:
    """Ascending log(m_eigs) for the Gramian of (lambdas, driver rows, tf).

    Raises UncontrollableError when the matrix is not positive definite
    at the highest precision rung (rank-deficient driver rows, or
    conditioning beyond the precision cap).
    """
    lambdas = np.asarray(lambdas, dtype=float)
    p_rows = np.atleast_2d(np.asarray(p_rows, dtype=float))
    rung_idx = None
    for idx, rung in enumerate(PRECISION_RUNGS):
        m = _build_m_mp(lambdas, p_rows, tf, rung)
        if _cholesky_passes(m, rung):
            rung_idx = idx
            break
    if rung_idx is None:
        raise UncontrollableError(
            "Gramian not positive definite at any precision rung "
            f"(up to {PRECISION_RUNGS[-1]} digits); the pair (A, B) is "
            "uncontrollable or beyond the precision cap",
        )

    work_idx = min(rung_idx + 1, len(PRECISION_RUNGS) - 1)
    while True:
        dps = PRECISION_RUNGS[work_idx]
        mp.dps = dps
        m = _build_m_mp(lambdas, p_rows, tf, dps)
        eigs = mp.eigsy(m, eigvals_only=True)
        mu_min, mu_max = eigs[0], eigs[eigs.rows - 1]
        resolved = mu_min > 0 and mu_min > mu_max * mp.mpf(10) ** (-(dps - 25))
        if resolved:
            logs = np.array([float(mp.log(eigs[i])) for i in range(eigs.rows)])
            return np.sort(logs)
        if work_idx == len(PRECISION_RUNGS) - 1:
            raise UncontrollableError(
                "Gramian eigenvalues unresolved at the highest precision rung "
                f"({dps} digits): min/max = {mp.nstr(mu_min, 5)}/{mp.nstr(mu_max, 5)}",
                m_eigs=np.array([float(mp.log(abs(eigs[i]) + mp.mpf('1e-999999')))
                                 for i in range(eigs.rows)]),
                log_scale=True,
            )
        work_idx += 1

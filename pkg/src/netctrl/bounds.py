"""Energy bounds from M's extremal eigenvalues and trace-moment estimates.

For a unit target the minimum energy satisfies
1/lambda_max(G) <= E <= 1/lambda_min(G).  The extremal eigenvalues are
either read off M's spectrum (``exact_spectrum``) or estimated from the
traces of M^2 and M^4 (and of the inverse powers) through

    f(alpha, beta) = sqrt(alpha/n + sqrt((n-1)/n * (beta - alpha^2/n)))

which bounds the largest eigenvalue magnitude from above.  The prior
practice of bounding lambda_max by trace(M) is kept for comparison
(``trace_prior``); the trace-moment lower bound is never looser.

All traces are spectral sums over m_eigs, never matrix products (the
matrix-power route exists only in the test oracles).  When eigenvalues
exceed e^150 the log-domain path takes over: log(m_eigs) in, log-bounds
out, with log-sum-exp in place of the sums.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .errors import ContractError, OverflowCapError, ParameterError
from .gramian import GramianResult, _check_positive
from .spectral import SpectralDecomposition

# Rounding guard on the inner radicand beta - alpha^2/n.
RADICAND_GUARD = 1e-9

# Above this eigenvalue magnitude, linear-domain trace sums overflow.
LOG_TRACE_SWITCH = _kernels.TRACE_LINEAR_CAP


@dataclass(frozen=True)
class TracePair:
    """Traces of a matrix's second and fourth powers."""

    alpha: float
    beta: float
    n: int

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ContractError(
                f"trace pair must be positive, got alpha={self.alpha}, beta={self.beta}"
            )
        if self.beta < self.alpha**2 / self.n - RADICAND_GUARD * self.beta:
            raise ContractError(
                f"beta={self.beta} below alpha^2/n={self.alpha**2 / self.n} "
                "beyond the rounding guard"
            )


@dataclass(frozen=True)
class LogTracePair:
    """Trace pair in log magnitude, for spectra beyond the linear range."""

    log_alpha: float
    log_beta: float
    n: int


@dataclass(frozen=True)
class EnergyBounds:
    """Lower/upper energy bounds for a unit target at horizon tf.

    ``log_lower``/``log_upper`` always carry the natural logs; ``lower``
    and ``upper`` are their linear values and may under- or overflow to
    0/inf in extreme regimes.
    """

    lower: float
    upper: float
    tf: float
    method: str
    log_lower: float = None
    log_upper: float = None

    def __post_init__(self):
        if self.method not in ("estimated", "exact_spectrum", "analytic_regime", "trace_prior"):
            raise ParameterError(f"unknown bounds method {self.method!r}")
        if self.log_lower is None:
            object.__setattr__(self, "log_lower", _safe_log(self.lower))
        if self.log_upper is None:
            object.__setattr__(self, "log_upper", _safe_log(self.upper))


def _safe_log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def f_lam(alpha: float, beta: float, n: int) -> float:
    """Trace-moment bound on the largest eigenvalue magnitude.

    Exact for n <= 2 and for scalar multiples of the identity.  The inner
    radicand is clamped at zero when within the rounding guard.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    TracePair(alpha=alpha, beta=beta, n=n)  # validates positivity + guard
    inner = beta - alpha * alpha / n
    if inner < 0:
        inner = 0.0
    return math.sqrt(alpha / n + math.sqrt((n - 1) / n * inner))


def f_lam_log(log_alpha: float, log_beta: float, n: int) -> float:
    """log of f_lam from log traces; safe for any magnitude."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    delta = 2.0 * log_alpha - math.log(n) - log_beta
    if delta > math.log1p(RADICAND_GUARD):
        raise ContractError(
            f"log trace pair violates beta >= alpha^2/n: delta={delta:.3e}"
        )
    if delta >= 0.0 or n == 1:
        # radicand clamped to zero
        return 0.5 * (log_alpha - math.log(n))
    log_inner = log_beta + math.log1p(-math.exp(delta))
    log_term2 = 0.5 * (math.log((n - 1) / n) + log_inner)
    return 0.5 * float(np.logaddexp(log_alpha - math.log(n), log_term2))


def trace_pair_from_eigs(m_eigs: np.ndarray) -> TracePair:
    mu = np.asarray(m_eigs, dtype=float)
    if float(np.max(np.abs(mu))) > math.exp(LOG_TRACE_SWITCH):
        raise OverflowCapError(
            "eigenvalue magnitude beyond e^150; use the log-domain trace path"
        )
    return TracePair(alpha=float(np.sum(mu**2)), beta=float(np.sum(mu**4)), n=mu.size)


def inverse_trace_pair_from_eigs(m_eigs: np.ndarray) -> TracePair:
    mu = np.asarray(m_eigs, dtype=float)
    if np.any(mu == 0):
        raise ContractError("singular matrix: zero eigenvalue in inverse trace pair")
    inv = 1.0 / mu
    if float(np.max(np.abs(inv))) > math.exp(LOG_TRACE_SWITCH):
        raise OverflowCapError(
            "inverse eigenvalue magnitude beyond e^150; use the log-domain trace path"
        )
    return TracePair(alpha=float(np.sum(inv**2)), beta=float(np.sum(inv**4)), n=mu.size)


def log_trace_pair(log_m_eigs: np.ndarray, power: int = 1) -> LogTracePair:
    """Log traces of M^(2p) and M^(4p) from log eigenvalues (p = +-1)."""
    logs = np.asarray(log_m_eigs, dtype=float)
    return LogTracePair(
        log_alpha=float(logsumexp(2.0 * power * logs)),
        log_beta=float(logsumexp(4.0 * power * logs)),
        n=logs.size,
    )


def _eigs_of(m) -> np.ndarray:
    if isinstance(m, GramianResult):
        return m.m_eigs
    m = np.asarray(m, dtype=float)
    if np.max(np.abs(m - m.T)) > 1e-12 * max(1.0, float(np.max(np.abs(m)))):
        raise ContractError("matrix must be symmetric")
    return np.linalg.eigvalsh(m)


def estimate_lambda_max(m) -> float:
    """Largest-eigenvalue estimate f(trace(M^2), trace(M^4))."""
    pair = trace_pair_from_eigs(_eigs_of(m))
    return f_lam(pair.alpha, pair.beta, pair.n)


def estimate_lambda_min(m) -> float:
    """Smallest-eigenvalue estimate 1/f from the inverse-power traces."""
    pair = inverse_trace_pair_from_eigs(_eigs_of(m))
    return 1.0 / f_lam(pair.alpha, pair.beta, pair.n)


def energy_bounds_exact(result: GramianResult) -> EnergyBounds:
    """(1/mu_max, 1/mu_min) from M's spectrum."""
    _check_positive(result.m_eigs)
    return EnergyBounds(
        lower=1.0 / float(result.m_eigs[-1]),
        upper=1.0 / float(result.m_eigs[0]),
        tf=result.tf,
        method="exact_spectrum",
    )


def energy_bounds_estimated(result: GramianResult) -> EnergyBounds:
    """Lower bound 1/f(tr M^2, tr M^4); upper bound f of the inverse traces."""
    _check_positive(result.m_eigs)
    mu = result.m_eigs
    if float(mu[-1]) > math.exp(LOG_TRACE_SWITCH) or float(mu[0]) < math.exp(-LOG_TRACE_SWITCH):
        logs = np.log(mu)
        return log_energy_bounds_estimated(logs, result.tf)
    upper_pair = trace_pair_from_eigs(mu)
    lower_pair = inverse_trace_pair_from_eigs(mu)
    return EnergyBounds(
        lower=1.0 / f_lam(upper_pair.alpha, upper_pair.beta, upper_pair.n),
        upper=f_lam(lower_pair.alpha, lower_pair.beta, lower_pair.n),
        tf=result.tf,
        method="estimated",
    )


def lower_bound_trace_prior(result: GramianResult) -> float:
    """Prior-practice lower bound 1/trace(M); looser than the estimate."""
    _check_positive(result.m_eigs)
    return 1.0 / float(np.sum(result.m_eigs))


def traces_one_driver_closed_form(decomp: SpectralDecomposition, h: int, tf: float) -> TracePair:
    """Closed-form trace(M^2), trace(M^4) for a single driver node h.

    Evaluates the explicit sums over eigenvalue pairs from row h of P,
    with the same series-safe integral factor used to build M.  Only
    valid in the linear-domain exponent range.
    """
    if not (0 <= h < decomp.n):
        raise ParameterError(f"driver index {h} out of range for n={decomp.n}")
    if tf <= 0:
        raise ParameterError(f"tf must be positive, got {tf}")
    xmax = 2.0 * float(decomp.lambdas[-1]) * tf
    if xmax > LOG_TRACE_SWITCH:
        raise OverflowCapError(
            f"max exponent {xmax:.6g} beyond the linear trace cap {LOG_TRACE_SWITCH:g}"
        )
    ph = np.ascontiguousarray(decomp.p[h, :])
    alpha, beta = _kernels.one_driver_traces(ph, decomp.lambdas, tf)
    return TracePair(alpha=alpha, beta=beta, n=decomp.n)


# -- log-domain bounds -------------------------------------------------------


def log_energy_bounds_exact(log_m_eigs: np.ndarray, tf: float) -> EnergyBounds:
    logs = np.asarray(log_m_eigs, dtype=float)
    log_lower = -float(np.max(logs))
    log_upper = -float(np.min(logs))
    return EnergyBounds(
        lower=_safe_exp(log_lower),
        upper=_safe_exp(log_upper),
        tf=tf,
        method="exact_spectrum",
        log_lower=log_lower,
        log_upper=log_upper,
    )


def log_energy_bounds_estimated(log_m_eigs: np.ndarray, tf: float) -> EnergyBounds:
    logs = np.asarray(log_m_eigs, dtype=float)
    up = log_trace_pair(logs, power=1)
    lo = log_trace_pair(logs, power=-1)
    log_lower = -f_lam_log(up.log_alpha, up.log_beta, up.n)
    log_upper = f_lam_log(lo.log_alpha, lo.log_beta, lo.n)
    return EnergyBounds(
        lower=_safe_exp(log_lower),
        upper=_safe_exp(log_upper),
        tf=tf,
        method="estimated",
        log_lower=log_lower,
        log_upper=log_upper,
    )


def log_lower_bound_trace_prior(log_m_eigs: np.ndarray) -> float:
    return -float(logsumexp(np.asarray(log_m_eigs, dtype=float)))


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


__all__ = [
    "TracePair",
    "LogTracePair",
    "EnergyBounds",
    "f_lam",
    "f_lam_log",
    "trace_pair_from_eigs",
    "inverse_trace_pair_from_eigs",
    "log_trace_pair",
    "estimate_lambda_max",
    "estimate_lambda_min",
    "energy_bounds_exact",
    "energy_bounds_estimated",
    "lower_bound_trace_prior",
    "traces_one_driver_closed_form",
    "log_energy_bounds_exact",
    "log_energy_bounds_estimated",
    "log_lower_bound_trace_prior",
]

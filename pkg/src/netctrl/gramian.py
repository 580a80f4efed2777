"""Finite-horizon controllability Gramian, minimum energy, optimal input.

For a symmetric adjacency A = P diag(lambdas) P^T driven at nodes
m_1 < ... < m_d, the Gramian over [0, tf] factors as G = P M P^T with
M[i][j] = q_ij * f_ij, where q_ij sums products of the driver rows of P
and f_ij = (e^((lam_i+lam_j) tf) - 1)/(lam_i+lam_j).  Everything here
works with M and its spectrum; G is never inverted densely.

A Simpson quadrature of the defining integral (matrix exponentials at
the nodes) is provided as an independent test oracle, plus an RK4
trajectory simulator to confirm that the optimal input actually reaches
the target state at the advertised energy.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from . import _kernels
from .errors import (
    ConditioningError,
    OverflowCapError,
    ParameterError,
    UncontrollableError,
)
from .spectral import SpectralDecomposition, eig_sym

F_SERIES_SWITCH = _kernels.F_SERIES_SWITCH
OVERFLOW_CAP = _kernels.OVERFLOW_CAP

# Separates genuine uncontrollability from rounding in M's spectrum.
POSITIVITY_RTOL = 1e-12

DEFAULT_ORACLE_STEPS = 4096
DEFAULT_COND_CAP = 1e10


@dataclass(frozen=True)
class DriverSet:
    """Input nodes, as sorted unique 0-based indices."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(idx) == 0:
            raise ParameterError("driver set must contain at least one node")
        if list(idx) != sorted(set(idx)):
            raise ParameterError(f"driver indices must be sorted and unique, got {idx}")
        if idx[0] < 0:
            raise ParameterError(f"driver indices must be >= 0, got {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def d(self) -> int:
        return len(self.indices)

    def validate_for(self, n: int) -> None:
        if self.indices[-1] >= n:
            raise ParameterError(f"driver index {self.indices[-1]} out of range for n={n}")

    def b_matrix(self, n: int) -> np.ndarray:
        self.validate_for(n)
        b = np.zeros((n, self.d))
        for col, i in enumerate(self.indices):
            b[i, col] = 1.0
        return b

    @classmethod
    def all_nodes(cls, n: int) -> "DriverSet":
        return cls(tuple(range(n)))


@dataclass(frozen=True)
class GramianResult:
    """M = P^T G P for one (network, drivers, tf) cell, with its spectrum."""

    m: np.ndarray
    tf: float
    drivers: DriverSet
    m_eigs: np.ndarray
    m_vecs: np.ndarray
    decomp: SpectralDecomposition
    log_scale_flag: bool = False

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @property
    def cond(self) -> float:
        return float(self.m_eigs[-1] / self.m_eigs[0])


class MinEnergyResult(NamedTuple):
    energy: float
    cond: float


class SimulationResult(NamedTuple):
    endpoint: np.ndarray
    energy: float


def f_entry(lam_i: float, lam_j: float, tf: float) -> float:
    """Integral factor (e^((lam_i+lam_j) tf) - 1)/(lam_i+lam_j).

    Uses the closed form when |(lam_i+lam_j) tf| exceeds the series switch
    and a 4-term series otherwise (the limit for a vanishing sum is tf).
    Always positive for tf > 0.

    Raises OverflowCapError when (lam_i+lam_j)*tf exceeds the linear-domain
    cap, naming the offending exponent.
    """
    if tf <= 0:
        raise ParameterError(f"tf must be positive, got {tf}")
    s = lam_i + lam_j
    x = s * tf
    if x > OVERFLOW_CAP:
        raise OverflowCapError(
            f"(lam_i+lam_j)*tf = {x:.6g} exceeds the linear-domain cap {OVERFLOW_CAP:g}"
        )
    if abs(x) < F_SERIES_SWITCH:
        return tf * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0)
    return math.expm1(x) / s


def log_f_entry(lam_i: float, lam_j: float, tf: float) -> float:
    """log of f_entry, valid for any exponent (no overflow cap)."""
    if tf <= 0:
        raise ParameterError(f"tf must be positive, got {tf}")
    s = lam_i + lam_j
    x = s * tf
    if abs(x) < F_SERIES_SWITCH:
        return math.log(tf * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0))
    if x > 0:
        # log((e^x - 1)/s) = x + log1p(-e^-x) - log(s)
        return x + math.log1p(-math.exp(-x)) - math.log(s)
    return math.log1p(-math.exp(x)) - math.log(-s)


def build_m(decomp: SpectralDecomposition, drivers: DriverSet, tf: float) -> GramianResult:
    """Assemble M and its spectrum for the given drivers and horizon.

    With every node driven, Q is the identity and M is exactly diagonal.
    """
    n = decomp.n
    drivers.validate_for(n)
    if tf <= 0:
        raise ParameterError(f"tf must be positive, got {tf}")
    lambdas = decomp.lambdas
    xmax = 2.0 * float(lambdas[-1]) * tf
    if xmax > OVERFLOW_CAP:
        raise OverflowCapError(
            f"max (lam_i+lam_j)*tf = {xmax:.6g} exceeds the linear-domain cap "
            f"{OVERFLOW_CAP:g}; use the log-domain sweep path"
        )
    f = _kernels.f_matrix(lambdas, tf)
    if drivers.d == n:
        m = np.diag(np.diag(f).copy())
        m_eigs = np.sort(np.diag(f))
        order = np.argsort(np.diag(f), kind="stable")
        m_vecs = np.eye(n)[:, order]
    else:
        p1 = decomp.p[list(drivers.indices), :]
        q = p1.T @ p1
        m = q * f
        m = (m + m.T) / 2.0
        m_eigs, m_vecs = np.linalg.eigh(m)
    return GramianResult(
        m=m, tf=tf, drivers=drivers, m_eigs=m_eigs, m_vecs=m_vecs, decomp=decomp
    )


def gramian_quadrature(a: np.ndarray, drivers: DriverSet, tf: float, steps: int = DEFAULT_ORACLE_STEPS) -> np.ndarray:
    """Composite-Simpson approximation of int_0^tf e^(At) B B^T e^(A^T t) dt.

    Test oracle only: uses matrix exponentials at the quadrature nodes,
    independent of the spectral factorization.
    """
    if steps < 64:
        raise ParameterError(f"steps must be >= 64, got {steps}")
    if steps % 2 == 1:
        steps += 1
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    b = drivers.b_matrix(n)
    h = tf / steps
    eh = expm(a * h)
    fk = b.copy()
    acc = fk @ fk.T  # node 0
    for k in range(1, steps + 1):
        fk = eh @ fk
        w = 4.0 if k % 2 == 1 else 2.0
        if k == steps:
            w = 1.0
        acc = acc + w * (fk @ fk.T)
    return (h / 3.0) * acc


def _check_positive(m_eigs: np.ndarray):
    mu_max = float(m_eigs[-1])
    if not (mu_max > 0) or float(m_eigs[0]) <= POSITIVITY_RTOL * mu_max:
        raise UncontrollableError(
            "Gramian is not positive definite up to tolerance "
            f"(min eig {m_eigs[0]:.3e}, max eig {mu_max:.3e}); "
            "the pair (A, B) is uncontrollable or too ill-conditioned "
            "for the linear-domain path",
            m_eigs=m_eigs,
        )


def min_energy(result: GramianResult, x_f: np.ndarray) -> MinEnergyResult:
    """Minimum energy x_f^T G^{-1} x_f for a unit target, via the spectrum.

    Computes sum_k <v_k, P^T x_f>^2 / mu_k over M's eigenpairs; no dense
    inverse is ever formed.  Also reports cond = mu_max / mu_min.
    """
    x_f = np.asarray(x_f, dtype=float)
    nrm = float(np.linalg.norm(x_f))
    if abs(nrm - 1.0) > 1e-12:
        raise ParameterError(f"x_f must be a unit vector within 1e-12 (norm {nrm!r})")
    _check_positive(result.m_eigs)
    y = result.m_vecs.T @ (result.decomp.p.T @ x_f)
    energy = float(np.sum(y * y / result.m_eigs))
    return MinEnergyResult(energy=energy, cond=result.cond)


def _weight_vector(result: GramianResult, x_f: np.ndarray) -> np.ndarray:
    """w = M^{-1} P^T x_f through M's eigenpairs."""
    y = result.m_vecs.T @ (result.decomp.p.T @ x_f)
    return result.m_vecs @ (y / result.m_eigs)


def optimal_input(result: GramianResult, x_f: np.ndarray, t: float) -> np.ndarray:
    """Minimum-energy input u*(t) = B^T e^(A^T (tf-t)) G^{-1} x_f.

    Valid for 0 <= t <= tf; the induced trajectory from x(0)=0 reaches
    x_f at tf.
    """
    if not (0.0 <= t <= result.tf):
        raise ParameterError(f"t={t} outside [0, {result.tf}]")
    x_f = np.asarray(x_f, dtype=float)
    _check_positive(result.m_eigs)
    w = _weight_vector(result, x_f)
    lam = result.decomp.lambdas
    p1 = result.decomp.p[list(result.drivers.indices), :]
    return p1 @ (np.exp(lam * (result.tf - t)) * w)


def simulate_trajectory(
    result: GramianResult,
    x_f: np.ndarray,
    steps: int = DEFAULT_ORACLE_STEPS,
    cond_cap: float = DEFAULT_COND_CAP,
) -> SimulationResult:
    """Drive x' = Ax + Bu*(t) from the origin and report (x(tf), energy).

    Fixed-step RK4 on a 2*steps+1 half-step grid; the realized energy is
    the Simpson quadrature of ||u*||^2.  Refuses when cond(G) exceeds
    ``cond_cap`` (expected deep in the large-horizon positive-definite
    regime, where the trajectory is not numerically meaningful).
    """
    x_f = np.asarray(x_f, dtype=float)
    _check_positive(result.m_eigs)
    cond = result.cond
    if cond > cond_cap:
        raise ConditioningError(
            f"cond(G) = {cond:.3e} exceeds the simulation cap {cond_cap:.3e}; "
            "endpoint would be dominated by rounding"
        )
    lam = result.decomp.lambdas
    if float(lam[-1]) * result.tf > OVERFLOW_CAP:
        raise OverflowCapError("state propagator overflows the linear-domain cap")
    w = _weight_vector(result, x_f)
    p1 = result.decomp.p[list(result.drivers.indices), :]
    # inputs on the half-step grid, shape (2*steps+1, d)
    t_nodes = np.linspace(0.0, result.tf, 2 * steps + 1)
    u_nodes = np.exp(np.outer(result.tf - t_nodes, lam)) * w @ p1.T
    a = result.decomp.reconstruct()
    drivers = np.asarray(result.drivers.indices, dtype=np.int64)
    endpoint, energy = _kernels.rk4_energy(a, drivers, u_nodes, result.tf, steps)
    return SimulationResult(endpoint=endpoint, energy=float(energy))


def build_network_gramian(network, drivers: DriverSet, tf: float) -> GramianResult:
    """Convenience: eig_sym(network) then build_m."""
    a = network.entries if hasattr(network, "entries") else np.asarray(network, dtype=float)
    return build_m(eig_sym(a), drivers, tf)

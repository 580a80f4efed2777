"""Test-network generation and definiteness classification.

Networks are grown by degree-preferential attachment from an initial
clique, given uniform edge weights, and shifted on the diagonal by
``a + s_i`` where ``s_i`` is the negative of row i's off-diagonal sum.
Choosing ``a`` then places the spectrum: strongly negative ``a`` gives a
negative-definite matrix, ``a = 0`` with nonnegative weights gives a
negative-semidefinite one (row sums vanish), and so on.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .spectral import eig_sym

DEFINITENESS_TOL = 1e-9

CLASS_LABELS = ("ND", "NSD", "ID", "PSD", "PD")


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple undirected graph; edges as (i, j) pairs with i < j."""

    n: int
    edges: tuple
    seed: int

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


@dataclass(frozen=True)
class WeightedNetwork:
    """Symmetric weighted adjacency with self-loops.

    ``entries`` is the full n-by-n matrix (units of inverse time);
    ``seed`` is the RNG seed used to draw the weights.
    """

    n: int
    entries: np.ndarray
    seed: int

    def __post_init__(self):
        a = self.entries
        if a.shape != (self.n, self.n):
            raise ParameterError(f"entries shape {a.shape} != ({self.n}, {self.n})")
        if not np.array_equal(a, a.T):
            raise ParameterError("entries must be exactly symmetric")


@dataclass(frozen=True)
class Definiteness:
    """Sign class of a symmetric spectrum under a relative tolerance."""

    label: str
    tol: float

    def __post_init__(self):
        if self.label not in CLASS_LABELS:
            raise ParameterError(f"unknown definiteness label {self.label!r}")


def generate_ba(n: int, edges_per_new_node: int, seed: int) -> UndirectedGraph:
    """Grow a scale-free graph by degree-preferential attachment.

    Starts from a complete graph on ``edges_per_new_node + 1`` nodes; each
    subsequent node attaches ``edges_per_new_node`` edges to distinct
    existing nodes picked proportionally to degree.  Deterministic for a
    fixed seed.
    """
    m = edges_per_new_node
    if m < 1:
        raise ParameterError(f"edges_per_new_node must be >= 1, got {m}")
    if n < m + 1:
        raise ParameterError(f"need n >= edges_per_new_node + 1, got n={n}, m={m}")

    rng = np.random.Generator(np.random.PCG64(seed))
    edges = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    # one entry per endpoint per edge: sampling uniformly from this pool
    # is sampling nodes proportionally to degree
    pool = [v for e in edges for v in e]
    for v in range(m + 1, n):
        targets = []
        while len(targets) < m:
            cand = pool[int(rng.integers(len(pool)))]
            if cand not in targets:
                targets.append(cand)
        for t in targets:
            edges.append((t, v))
            pool.append(t)
            pool.append(v)
    return UndirectedGraph(n=n, edges=tuple(edges), seed=seed)


def weight_and_shift(graph: UndirectedGraph, weight_interval, a: float, seed: int) -> WeightedNetwork:
    """Draw uniform edge weights and set the diagonal to ``a + s_i``.

    ``s_i`` is the negative of row i's off-diagonal sum, so for ``a = 0``
    every row sums to zero and the all-ones vector lies in the kernel.
    """
    lo, hi = float(weight_interval[0]), float(weight_interval[1])
    if lo > hi:
        raise ParameterError(f"weight interval [{lo}, {hi}] has lo > hi")

    rng = np.random.Generator(np.random.PCG64(seed))
    n = graph.n
    entries = np.zeros((n, n))
    for i, j in graph.edges:
        w = float(rng.uniform(lo, hi))
        entries[i, j] = w
        entries[j, i] = w
    s = -entries.sum(axis=1)
    entries[np.diag_indices(n)] = a + s
    return WeightedNetwork(n=n, entries=entries, seed=seed)


def classify(network, tol: float = DEFINITENESS_TOL) -> Definiteness:
    """Classify the spectrum's sign pattern as ND/NSD/ID/PSD/PD.

    Accepts a WeightedNetwork or a bare symmetric matrix.  Uses the
    threshold ``tol * max(1, max|lambda|)``: eigenvalues within it count
    as zero.
    """
    a = network.entries if isinstance(network, WeightedNetwork) else np.asarray(network, dtype=float)
    lambdas = eig_sym(a).lambdas
    return Definiteness(label=classify_eigs(lambdas, tol), tol=tol)


def classify_eigs(lambdas: np.ndarray, tol: float = DEFINITENESS_TOL) -> str:
    lambdas = np.asarray(lambdas, dtype=float)
    tau = tol * max(1.0, float(np.max(np.abs(lambdas))))
    near_zero = np.abs(lambdas) <= tau
    if np.all(lambdas < -tau):
        return "ND"
    if np.all(lambdas <= tau) and np.any(near_zero):
        return "NSD"
    if np.all(lambdas > tau):
        return "PD"
    if np.all(lambdas >= -tau) and np.any(near_zero):
        return "PSD"
    return "ID"


# -- JSON interchange -------------------------------------------------------
# {n, edges: [[i, j, w], ...], diag: [...], seed} with 0-based indices.


def network_to_dict(net: WeightedNetwork) -> dict:
    a = net.entries
    edges = []
    for i in range(net.n):
        for j in range(i + 1, net.n):
            if a[i, j] != 0.0:
                edges.append([i, j, float(a[i, j])])
    return {
        "n": net.n,
        "edges": edges,
        "diag": [float(x) for x in np.diag(a)],
        "seed": int(net.seed),
    }


def network_from_dict(d: dict) -> WeightedNetwork:
    for key in ("n", "edges", "diag", "seed"):
        if key not in d:
            raise ParameterError(f"network JSON missing field {key!r}")
    n = int(d["n"])
    if n < 1:
        raise ParameterError(f"network JSON field 'n' must be >= 1, got {n}")
    if len(d["diag"]) != n:
        raise ParameterError(f"network JSON field 'diag' has length {len(d['diag'])} != n={n}")
    entries = np.zeros((n, n))
    for i, j, w in d["edges"]:
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n and i != j):
            raise ParameterError(f"network JSON edge ({i}, {j}) out of range for n={n}")
        entries[i, j] = float(w)
        entries[j, i] = float(w)
    entries[np.diag_indices(n)] = [float(x) for x in d["diag"]]
    return WeightedNetwork(n=n, entries=entries, seed=int(d["seed"]))


def save_network(net: WeightedNetwork, path) -> None:
    with open(path, "w") as fh:
        json.dump(network_to_dict(net), fh, sort_keys=True)
        fh.write("\n")


def load_network(path) -> WeightedNetwork:
    with open(path) as fh:
        return network_from_dict(json.load(fh))

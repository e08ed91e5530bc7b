"""Weighted MaxCut instances: containers, benchmark generators, cut evaluation,
Ising encoding, a small-instance brute-force oracle, and edge-list file I/O.

All randomness goes through ``numpy.random.default_rng`` (PCG64), so every
generator is a pure function of its parameters and seed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

# Enumeration guard for the exact solver: 2^(n-1) assignments.
BRUTE_FORCE_MAX_VERTICES = 24

_BRUTE_CHUNK = 1 << 20


class WeightedGraph:
    """Undirected weighted graph stored as flat edge arrays.

    Edges are kept canonical: ``0 <= i < j < n_vertices``, no self loops, no
    duplicate pairs, all weights finite. Vertex pairs given in reverse order
    are normalized on construction.
    """

    __slots__ = ("n_vertices", "edge_i", "edge_j", "weight")

    def __init__(self, n_vertices: int, edges: Iterable = ()) -> None:
        mat = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.float64)
        if mat.size == 0:
            ei = np.zeros(0, dtype=np.int64)
            ej = np.zeros(0, dtype=np.int64)
            w = np.zeros(0, dtype=np.float64)
        else:
            if mat.ndim != 2 or mat.shape[1] != 3:
                raise ValueError("edges must be a sequence of (i, j, w) triples")
            ij = mat[:, :2]
            if not np.all(ij == np.floor(ij)):
                raise ValueError("vertex indices must be integers")
            ei = ij[:, 0].astype(np.int64)
            ej = ij[:, 1].astype(np.int64)
            w = mat[:, 2].copy()
        self._init_arrays(int(n_vertices), ei, ej, w)

    @classmethod
    def from_arrays(cls, n_vertices: int, edge_i: np.ndarray, edge_j: np.ndarray,
                    weight: np.ndarray) -> "WeightedGraph":
        """Fast constructor from prebuilt index/weight arrays (still validated)."""
        g = cls.__new__(cls)
        g._init_arrays(int(n_vertices),
                       np.asarray(edge_i, dtype=np.int64).copy(),
                       np.asarray(edge_j, dtype=np.int64).copy(),
                       np.asarray(weight, dtype=np.float64).copy())
        return g

    def _init_arrays(self, n_vertices, ei, ej, w):
        if n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        if not (ei.shape == ej.shape == w.shape):
            raise ValueError("edge arrays must have matching lengths")
        swap = ei > ej
        if swap.any():
            ei, ej = np.where(swap, ej, ei), np.where(swap, ei, ej)
        if ei.size:
            if ei.min() < 0 or ej.max() >= n_vertices:
                raise ValueError("edge endpoint out of range")
            if (ei == ej).any():
                raise ValueError("self loops are not allowed")
            keys = ei * n_vertices + ej
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate edges are not allowed")
            if not np.isfinite(w).all():
                raise ValueError("edge weights must be finite")
        self.n_vertices = n_vertices
        self.edge_i = ei
        self.edge_j = ej
        self.weight = w

    @property
    def n_edges(self) -> int:
        return int(self.edge_i.size)

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    def edge_list(self) -> list[tuple[int, int, float]]:
        return [(int(i), int(j), float(w))
                for i, j, w in zip(self.edge_i, self.edge_j, self.weight)]

    def degrees(self) -> np.ndarray:
        d = np.bincount(self.edge_i, minlength=self.n_vertices)
        d += np.bincount(self.edge_j, minlength=self.n_vertices)
        return d

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric weight matrix (zeros off the edge set)."""
        a = np.zeros((self.n_vertices, self.n_vertices))
        a[self.edge_i, self.edge_j] = self.weight
        a[self.edge_j, self.edge_i] = self.weight
        return a

    def __repr__(self) -> str:
        return f"WeightedGraph(n_vertices={self.n_vertices}, n_edges={self.n_edges})"


@dataclass(frozen=True)
class CutAssignment:
    """A binary vertex partition together with its cached cut value."""

    bits: np.ndarray
    cut: float

    @classmethod
    def from_bits(cls, graph: WeightedGraph, bits) -> "CutAssignment":
        arr = _as_bits(bits, graph.n_vertices)
        return cls(bits=arr, cut=cut_value(graph, arr))

    def bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


@dataclass(frozen=True)
class IsingModel:
    """Diagonal Hamiltonian ``constant + sum_k coeff_k * Z_i Z_j``.

    For the MaxCut encoding, evaluating on spins ``z = 1 - 2*bits`` reproduces
    the cut value of ``bits`` exactly.
    """

    constant: float
    zz_i: np.ndarray
    zz_j: np.ndarray
    zz_coeff: np.ndarray

    @property
    def zz_terms(self) -> Iterator[tuple[int, int, float]]:
        return ((int(i), int(j), float(c))
                for i, j, c in zip(self.zz_i, self.zz_j, self.zz_coeff))

    def evaluate(self, spins) -> float:
        if self.zz_i.size == 0:
            return float(self.constant)
        s = np.asarray(spins, dtype=np.float64)
        if s.size <= int(self.zz_j.max()):
            raise ValueError("spin vector shorter than the highest vertex index")
        return float(self.constant + np.dot(self.zz_coeff, s[self.zz_i] * s[self.zz_j]))


def _as_bits(bits, n: int) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.shape != (n,):
        raise ValueError(f"expected {n} bits, got shape {arr.shape}")
    arr = arr.astype(np.int8)
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    arr.flags.writeable = False
    return arr


def cut_value(graph: WeightedGraph, bits) -> float:
    """Total weight of edges whose endpoints fall on different sides."""
    arr = _as_bits(bits, graph.n_vertices)
    if graph.n_edges == 0:
        return 0.0
    crossed = arr[graph.edge_i] != arr[graph.edge_j]
    return float(np.dot(graph.weight, crossed))


def normalized_avg_cut(cuts: Sequence[float], edge_count: int) -> float:
    """Mean of ``cuts`` divided by the edge count."""
    arr = np.asarray(cuts, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cuts must be non-empty")
    if edge_count <= 0:
        raise ValueError("edge_count must be positive")
    return float(arr.mean() / edge_count)


def to_ising(graph: WeightedGraph) -> IsingModel:
    """Encode MaxCut as ``sum_e w/2 * (1 - Z_i Z_j)``: constant ``sum(w)/2``
    and one ZZ term with coefficient ``-w/2`` per edge."""
    return IsingModel(constant=graph.total_weight / 2.0,
                      zz_i=graph.edge_i.copy(),
                      zz_j=graph.edge_j.copy(),
                      zz_coeff=-graph.weight / 2.0)


# ---------------------------------------------------------------------------
# benchmark generators
# ---------------------------------------------------------------------------

def _draw_weights(rng, size, w_min, w_max, integer_weights):
    if w_min > w_max:
        raise ValueError("weight range is empty")
    if integer_weights:
        return rng.integers(int(w_min), int(w_max) + 1, size=size).astype(np.float64)
    return rng.uniform(w_min, w_max, size=size)


def gen_complete(n: int, seed: int, w_min: float = 1.0, w_max: float = 10.0,
                 integer_weights: bool = False) -> WeightedGraph:
    """Complete graph on ``n`` vertices with uniform random weights."""
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    rng = np.random.default_rng(seed)
    ei, ej = np.triu_indices(n, k=1)
    w = _draw_weights(rng, ei.size, w_min, w_max, integer_weights)
    return WeightedGraph.from_arrays(n, ei, ej, w)


def gen_cluster(n: int, community_size: int, intra_range: tuple[float, float],
                inter_range: tuple[float, float], p_inter: float, seed: int,
                integer_weights: bool = False) -> WeightedGraph:
    """Community benchmark: cliques of ``community_size`` with heavy internal
    weights, sparse lighter edges between communities.

    Communities are contiguous index blocks; when ``community_size`` does not
    divide ``n`` the last community is smaller.
    """
    if n < 2 or community_size < 1:
        raise ValueError("need n >= 2 and community_size >= 1")
    if not (0.0 <= p_inter <= 1.0):
        raise ValueError("p_inter must lie in [0, 1]")
    if intra_range[0] > intra_range[1] or inter_range[0] > inter_range[1]:
        raise ValueError("weight range is empty")
    rng = np.random.default_rng(seed)
    labels = np.arange(n) // community_size
    ei, ej = np.triu_indices(n, k=1)
    intra = labels[ei] == labels[ej]
    ii, ij = ei[intra], ej[intra]
    iw = _draw_weights(rng, ii.size, intra_range[0], intra_range[1], integer_weights)
    xi, xj = ei[~intra], ej[~intra]
    keep = rng.random(xi.size) < p_inter
    xi, xj = xi[keep], xj[keep]
    xw = _draw_weights(rng, xi.size, inter_range[0], inter_range[1], integer_weights)
    return WeightedGraph.from_arrays(n, np.concatenate([ii, xi]),
                                     np.concatenate([ij, xj]),
                                     np.concatenate([iw, xw]))


def gen_regular(n: int, degree: int, seed: int, w_min: float = 1.0,
                w_max: float = 10.0, integer_weights: bool = False,
                max_retries: int = 100) -> WeightedGraph:
    """Random ``degree``-regular simple graph via the pairing (configuration)
    model, rejecting attempts that produce self loops or multi-edges."""
    if degree < 1 or degree >= n:
        raise ValueError("need 1 <= degree < n")
    if (n * degree) % 2 != 0:
        raise ValueError("n * degree must be even")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), degree)
    for _ in range(max_retries):
        perm = rng.permutation(stubs)
        a, b = perm[0::2], perm[1::2]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        if (lo == hi).any():
            continue
        keys = lo * n + hi
        if np.unique(keys).size != keys.size:
            continue
        order = np.argsort(keys)
        w = _draw_weights(rng, lo.size, w_min, w_max, integer_weights)
        return WeightedGraph.from_arrays(n, lo[order], hi[order], w)
    raise RuntimeError(f"pairing model failed after {max_retries} attempts")


# ---------------------------------------------------------------------------
# exact solver (test oracle)
# ---------------------------------------------------------------------------

def brute_force_maxcut(graph: WeightedGraph) -> tuple[CutAssignment, float]:
    """Globally optimal cut by enumerating the 2^(n-1) assignments with
    vertex 0 pinned to side 0 (cut symmetry). Refuses n > 24."""
    n = graph.n_vertices
    if n > BRUTE_FORCE_MAX_VERTICES:
        raise ValueError(f"brute force capped at {BRUTE_FORCE_MAX_VERTICES} vertices")
    total = 1 << max(n - 1, 0)
    best_cut = -np.inf
    best_x = 0
    for start in range(0, total, _BRUTE_CHUNK):
        x = np.arange(start, min(start + _BRUTE_CHUNK, total), dtype=np.int64)
        cuts = np.zeros(x.size)
        for i, j, w in zip(graph.edge_i, graph.edge_j, graph.weight):
            bi = (x >> (i - 1)) & 1 if i > 0 else 0
            bj = (x >> (j - 1)) & 1
            cuts += w * (bi ^ bj)
        k = int(np.argmax(cuts))
        if cuts[k] > best_cut:
            best_cut = float(cuts[k])
            best_x = int(x[k])
    bits = np.zeros(n, dtype=np.int8)
    for v in range(1, n):
        bits[v] = (best_x >> (v - 1)) & 1
    assignment = CutAssignment.from_bits(graph, bits)
    return assignment, assignment.cut


# ---------------------------------------------------------------------------
# edge-list file format: first line "N M", then M lines "i j w"
# ---------------------------------------------------------------------------

def write_graph(graph: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{graph.n_vertices} {graph.n_edges}\n")
        for i, j, w in zip(graph.edge_i, graph.edge_j, graph.weight):
            # 17 significant digits round-trips any float64
            fh.write(f"{i} {j} {w:.17g}\n")


def read_graph(path) -> WeightedGraph:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError(f"{path}: empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"{path}:1: expected header 'N M'")
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise ValueError(f"{path}: header declares {m} edges, found {len(lines) - 1}")
    ei = np.zeros(m, dtype=np.int64)
    ej = np.zeros(m, dtype=np.int64)
    w = np.zeros(m)
    for k, ln in enumerate(lines[1:]):
        parts = ln.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{k + 2}: expected 'i j w'")
        try:
            ei[k], ej[k], w[k] = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ValueError(f"{path}:{k + 2}: {exc}") from None
    return WeightedGraph.from_arrays(n, ei, ej, w)

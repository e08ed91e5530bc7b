"""Goemans-Williamson benchmark solver.

The semidefinite relaxation is solved in low-rank Burer-Monteiro form: one
unit vector per vertex, Riemannian gradient ascent on the product of spheres
with step halving, best of a few random restarts. Rounding draws standard
normal hyperplanes and keeps the best induced cut; projection streams are
nested, so the first R draws of a seed are identical for every R' >= R.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .graphs import WeightedGraph, CutAssignment

_ROUND_CHUNK = 4096


@dataclass(frozen=True)
class EmbeddingSolution:
    """Unit-vector embedding of the relaxation plus its objective value."""

    vectors: np.ndarray         # (n_vertices, rank), unit rows
    relaxation_value: float
    ascent_trace: tuple[float, ...] = ()


@dataclass
class GwConfig:
    rank: int | None = None     # None: min(N, ceil(sqrt(2N)) + 1)
    ascent_iters: int = 500
    ascent_lr: float = 1.0
    restarts: int = 3
    projections: int = 100

    def __post_init__(self):
        if self.rank is not None and self.rank < 2:
            raise ValueError("rank must be >= 2")
        if self.projections < 1:
            raise ValueError("projections must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "GwConfig":
        return cls(**d)


def default_rank(n_vertices: int) -> int:
    return min(n_vertices, int(np.ceil(np.sqrt(2.0 * n_vertices))) + 1)


def _normalize_rows(v: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return v / norms


def _objective(graph: WeightedGraph, w_mat: np.ndarray, v: np.ndarray) -> float:
    # 1/4 sum_e w ||v_i - v_j||^2 = sum(w)/2 - 1/4 sum(V * (W V))
    return float(graph.total_weight / 2.0 - 0.25 * np.sum(v * (w_mat @ v)))


def bm_solve(graph: WeightedGraph, config: GwConfig | None = None,
             seed=None) -> EmbeddingSolution:
    """Locally optimal embedding of max 1/4 sum w||v_i - v_j||^2 over unit
    vectors, best over ``restarts`` seeded restarts."""
    config = config or GwConfig()
    rank = config.rank or default_rank(graph.n_vertices)
    rank = max(2, min(rank, graph.n_vertices)) if graph.n_vertices >= 2 else 2
    w_mat = graph.adjacency_matrix()
    rng = np.random.default_rng(seed)

    best_v = None
    best_f = -np.inf
    best_trace: list[float] = []
    for _ in range(max(1, config.restarts)):
        v = _normalize_rows(rng.standard_normal((graph.n_vertices, rank)))
        f = _objective(graph, w_mat, v)
        if not np.isfinite(f):
            raise RuntimeError("non-finite relaxation objective")
        lr = config.ascent_lr
        trace = [f]
        for _ in range(config.ascent_iters):
            ambient = -0.5 * (w_mat @ v)
            tangent = ambient - np.sum(ambient * v, axis=1, keepdims=True) * v
            gnorm = float(np.linalg.norm(tangent))
            if gnorm < 1e-12:
                break
            trial = _normalize_rows(v + lr * tangent)
            f_trial = _objective(graph, w_mat, trial)
            if not np.isfinite(f_trial):
                raise RuntimeError("non-finite relaxation objective")
            if f_trial > f:
                v, f = trial, f_trial
                trace.append(f)
            else:
                lr *= 0.5
                if lr < 1e-14:
                    break
        if f > best_f:
            best_f, best_v, best_trace = f, v, trace
    return EmbeddingSolution(vectors=best_v, relaxation_value=best_f,
                             ascent_trace=tuple(best_trace))


def hyperplane_round(embedding: EmbeddingSolution, r_projections: int,
                     graph: WeightedGraph, seed=None,
                     ) -> tuple[CutAssignment, np.ndarray]:
    """Randomized rounding: for each of ``r_projections`` standard-normal
    hyperplanes g, set bit_i = 1 iff g . v_i >= 0; returns the best assignment
    (cut recomputed exactly) and all projection cut values."""
    if r_projections < 1:
        raise ValueError("need at least one projection")
    v = embedding.vectors
    n = v.shape[0]
    w_mat = graph.adjacency_matrix()
    total_w = graph.total_weight
    rng = np.random.default_rng(seed)

    cuts = np.empty(r_projections)
    best_cut = -np.inf
    best_bits = np.zeros(n, dtype=np.int8)
    done = 0
    while done < r_projections:
        # fixed-size draws keep the projection stream identical across R
        g = rng.standard_normal((_ROUND_CHUNK, v.shape[1]))
        take = min(_ROUND_CHUNK, r_projections - done)
        bits = (g[:take] @ v.T >= 0.0)
        s = 1.0 - 2.0 * bits
        quad = np.sum((s @ w_mat) * s, axis=1)
        c = 0.5 * (total_w - 0.5 * quad)
        cuts[done:done + take] = c
        k = int(np.argmax(c))
        if c[k] > best_cut:
            best_cut = float(c[k])
            best_bits = bits[k].astype(np.int8)
        done += take
    return CutAssignment.from_bits(graph, best_bits), cuts


def gw_solve(graph: WeightedGraph, config: GwConfig | None = None,
             seed=None) -> tuple[CutAssignment, dict]:
    """Embedding ascent followed by hyperplane rounding; the report gathers
    the relaxation value, the best and mean rounded cuts, and a config echo."""
    config = config or GwConfig()
    ss = np.random.SeedSequence(seed)
    embed_seed, round_seed = ss.spawn(2)
    embedding = bm_solve(graph, config, seed=embed_seed)
    best, cuts = hyperplane_round(embedding, config.projections, graph,
                                  seed=round_seed)
    report = {
        "relaxation_value": embedding.relaxation_value,
        "best_cut": best.cut,
        "mean_cut": float(cuts.mean()),
        "projections": config.projections,
        "rank": int(embedding.vectors.shape[1]),
        "config": config.to_dict(),
        "seed": seed,
    }
    return best, report


def gw_runs(graph: WeightedGraph, config: GwConfig | None = None,
            seed=None, runs: int = 10) -> list[tuple[CutAssignment, dict]]:
    """Independent (embedding + rounding) repetitions with seeds spawned from
    ``seed``; callers average the per-run best cuts."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    rng = np.random.default_rng(seed)
    child_seeds = rng.integers(0, 2 ** 62, size=runs)
    return [gw_solve(graph, config, seed=int(s)) for s in child_seeds]

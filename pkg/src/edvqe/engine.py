"""Distributed product-state engine.

The global trial state is a tensor product of independent subsystem states,
one per vertex block. Because the MaxCut Hamiltonian is diagonal, the
expectation of every edge term factorizes exactly across blocks: an edge
inside a block uses that block's true <Z_i Z_j> correlator, an edge between
blocks uses the product <Z_i><Z_j>. Gradients use the exact +-pi/2
parameter-shift rule, optimization is plain Adam ascent on the expected cut.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .graphs import WeightedGraph, CutAssignment
from .simulator import (AnsatzCircuit, Gate, run_circuit_batch,
                        run_circuit_prefixes, continue_circuit_batch)

# cap on rows*dim per batched simulation chunk (~64 MB of complex128)
_CHUNK_ELEMS = 1 << 22


@dataclass(frozen=True)
class SubsystemLayout:
    """Partition of the vertex set into ordered blocks, one per subsystem."""

    blocks: tuple[tuple[int, ...], ...]
    subsystem_size: int

    def __post_init__(self):
        seen: list[int] = []
        for block in self.blocks:
            if len(block) == 0 or len(block) > self.subsystem_size:
                raise ValueError("block sizes must lie in [1, subsystem_size]")
            if list(block) != sorted(block):
                raise ValueError("vertices within a block must be increasing")
            seen.extend(block)
        n = len(seen)
        if sorted(seen) != list(range(n)):
            raise ValueError("blocks must partition 0..N-1")

    @property
    def n_vertices(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


def partition_vertices(n_vertices: int, subsystem_size: int) -> SubsystemLayout:
    """Contiguous blocks of ``subsystem_size`` vertices; the last block may be
    smaller. 506 vertices at size 11 gives 46 blocks."""
    if subsystem_size < 2:
        raise ValueError("subsystem_size must be >= 2")
    if n_vertices < 1:
        raise ValueError("need at least one vertex")
    blocks = tuple(tuple(range(lo, min(lo + subsystem_size, n_vertices)))
                   for lo in range(0, n_vertices, subsystem_size))
    return SubsystemLayout(blocks=blocks, subsystem_size=subsystem_size)


def build_ansatz(block_size: int, layers: int) -> AnsatzCircuit:
    """Hardware-style layered circuit: per layer one RX on every qubit, then
    RZX along the linear chain (q, q+1). Every gate owns a distinct parameter,
    so the whole circuit has ``layers * (2*block_size - 1)`` of them."""
    if block_size < 1 or layers < 1:
        raise ValueError("need block_size >= 1 and layers >= 1")
    gates: list[Gate] = []
    p = 0
    for _ in range(layers):
        for q in range(block_size):
            gates.append(Gate("rx", (q,), p))
            p += 1
        for q in range(block_size - 1):
            gates.append(Gate("rzx", (q, q + 1), p))
            p += 1
    return AnsatzCircuit(n_qubits=block_size, gates=tuple(gates), n_params=p)


@dataclass
class OptimizerConfig:
    """Adam settings plus stopping rules for the energy ascent."""

    learning_rate: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    max_iters: int = 300
    grad_tol: float = 1e-8
    energy_tol: float = 1e-6
    patience: int = 20

    def __post_init__(self):
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValueError("beta1 and beta2 must lie in (0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizerConfig":
        return cls(**d)


@dataclass
class DistributedState:
    """Per-subsystem circuits, parameters and simulated states, plus the
    cached single-vertex <Z> values and intra-block <ZZ> correlators that the
    factorized energy needs."""

    layout: SubsystemLayout
    circuits: list[AnsatzCircuit]
    params: list[np.ndarray]
    states: list[np.ndarray]
    z_values: np.ndarray
    zz_values: list[np.ndarray]


def total_params(circuits: list[AnsatzCircuit]) -> int:
    return sum(c.n_params for c in circuits)


def split_params(circuits: list[AnsatzCircuit], flat) -> list[np.ndarray]:
    vec = np.asarray(flat, dtype=np.float64)
    if vec.shape != (total_params(circuits),):
        raise ValueError(f"expected {total_params(circuits)} parameters")
    out = []
    k = 0
    for c in circuits:
        out.append(vec[k:k + c.n_params].copy())
        k += c.n_params
    return out


# ---------------------------------------------------------------------------
# factorized energy model
# ---------------------------------------------------------------------------

class _BlockIndex:
    """Per-block measurement tables and edge bookkeeping."""

    __slots__ = ("vertices", "size", "dim", "zsign", "intra_a", "intra_b",
                 "intra_w", "zzsign", "cross_local", "cross_other", "cross_w")

    def __init__(self, vertices, zsign_cache):
        self.vertices = np.asarray(vertices, dtype=np.int64)
        self.size = len(vertices)
        self.dim = 1 << self.size
        if self.size not in zsign_cache:
            idx = np.arange(self.dim)
            qs = np.arange(self.size)
            zsign_cache[self.size] = 1.0 - 2.0 * ((idx[:, None] >> qs[None, :]) & 1)
        self.zsign = zsign_cache[self.size]


class _FactorModel:
    """Joins a graph with a layout: classifies edges as intra/cross-block and
    precomputes the sign tables for vectorized expectation evaluation."""

    def __init__(self, graph: WeightedGraph, layout: SubsystemLayout,
                 circuits: list[AnsatzCircuit]):
        if layout.n_vertices != graph.n_vertices:
            raise ValueError("layout does not cover the graph's vertices")
        if len(circuits) != layout.n_blocks:
            raise ValueError("need one circuit per block")
        for c, b in zip(circuits, layout.blocks):
            if c.n_qubits != len(b):
                raise ValueError("circuit width must match its block size")
        self.graph = graph
        self.layout = layout
        self.circuits = circuits

        n = graph.n_vertices
        vblock = np.empty(n, dtype=np.int64)
        vlocal = np.empty(n, dtype=np.int64)
        for b, verts in enumerate(layout.blocks):
            arr = np.asarray(verts)
            vblock[arr] = b
            vlocal[arr] = np.arange(len(verts))
        self.vertex_block = vblock
        self.vertex_local = vlocal

        ei, ej, w = graph.edge_i, graph.edge_j, graph.weight
        bi, bj = vblock[ei], vblock[ej]
        intra = bi == bj
        self.cross_i = ei[~intra]
        self.cross_j = ej[~intra]
        self.cross_w = w[~intra]

        zsign_cache: dict[int, np.ndarray] = {}
        self.blocks: list[_BlockIndex] = []
        for b, verts in enumerate(layout.blocks):
            blk = _BlockIndex(verts, zsign_cache)
            sel = intra & (bi == b)
            blk.intra_a = vlocal[ei[sel]]
            blk.intra_b = vlocal[ej[sel]]
            blk.intra_w = w[sel]
            blk.zzsign = blk.zsign[:, blk.intra_a] * blk.zsign[:, blk.intra_b]
            m1 = ~intra & (bi == b)
            m2 = ~intra & (bj == b)
            blk.cross_local = np.concatenate([vlocal[ei[m1]], vlocal[ej[m2]]])
            blk.cross_other = np.concatenate([ej[m1], ei[m2]])
            blk.cross_w = np.concatenate([w[m1], w[m2]])
            self.blocks.append(blk)

        # group equal-width blocks sharing a circuit object so their
        # simulations batch into single kernel sweeps
        groups: dict[int, list[int]] = {}
        for b, c in enumerate(circuits):
            groups.setdefault(id(c), []).append(b)
        self.groups = list(groups.values())

    # -- simulation ---------------------------------------------------------

    def run_blocks(self, params: list[np.ndarray]):
        """Simulate every block; returns (states, z, zz) with z indexed by
        global vertex and zz aligned with each block's intra-edge arrays."""
        n = self.graph.n_vertices
        states: list[np.ndarray | None] = [None] * len(self.blocks)
        z = np.empty(n)
        zz: list[np.ndarray | None] = [None] * len(self.blocks)
        for group in self.groups:
            circ = self.circuits[group[0]]
            mat = np.stack([params[b] for b in group])
            amps = run_circuit_batch(circ, mat)
            probs = amps.real ** 2 + amps.imag ** 2
            for row, b in enumerate(group):
                blk = self.blocks[b]
                states[b] = amps[row]
                z[blk.vertices] = probs[row] @ blk.zsign
                zz[b] = probs[row] @ blk.zzsign
        return states, z, zz

    # -- energy -------------------------------------------------------------

    def energy(self, z: np.ndarray, zz: list[np.ndarray]) -> float:
        e = 0.0
        for blk, corr in zip(self.blocks, zz):
            if blk.intra_w.size:
                e += 0.5 * np.dot(blk.intra_w, 1.0 - corr)
        if self.cross_w.size:
            e += 0.5 * np.dot(self.cross_w, 1.0 - z[self.cross_i] * z[self.cross_j])
        return float(e)

    # -- parameter-shift gradient -------------------------------------------

    def gradient(self, params: list[np.ndarray], z: np.ndarray) -> np.ndarray:
        """d(energy)/d(theta_k) = [E(theta_k + pi/2) - E(theta_k - pi/2)] / 2.

        Only the owning block's expectations move under a shift, so each
        parameter needs two extra simulations of one block; factors of all
        other blocks enter through the cached ``z``. Shifted runs resume from
        cached prefix states of the base run, skipping the gates before the
        first use of the shifted parameter.
        """
        grads: list[tuple[int, np.ndarray]] = []
        for group in self.groups:
            circ = self.circuits[group[0]]
            p = circ.n_params
            dim = 1 << circ.n_qubits
            n_gates = len(circ.gates)
            first_gate = np.full(p, n_gates, dtype=np.int64)
            for g_idx, gate in enumerate(circ.gates):
                if g_idx < first_gate[gate.param_index]:
                    first_gate[gate.param_index] = g_idx
            use_prefix = (n_gates + 1) * dim <= _CHUNK_ELEMS
            rows_per_block = 2 * p
            blocks_per_chunk = max(1, _CHUNK_ELEMS // max(rows_per_block * dim, 1))
            cols = np.arange(p)
            for lo in range(0, len(group), blocks_per_chunk):
                chunk = group[lo:lo + blocks_per_chunk]
                rows = len(chunk) * rows_per_block
                amps = np.empty((rows, dim), dtype=np.complex128)
                thetas = np.empty((rows, p))
                starts = np.zeros(rows, dtype=np.int64)
                for i, b in enumerate(chunk):
                    base = params[b]
                    sl = slice(i * rows_per_block, (i + 1) * rows_per_block)
                    mat = np.repeat(base[None, :], rows_per_block, axis=0)
                    mat[2 * cols, cols] += 0.5 * np.pi
                    mat[2 * cols + 1, cols] -= 0.5 * np.pi
                    thetas[sl] = mat
                    if use_prefix:
                        prefixes = run_circuit_prefixes(circ, base)
                        starts[sl] = np.repeat(first_gate, 2)
                        amps[sl] = prefixes[starts[sl]]
                    else:
                        amps[sl] = 0.0
                        amps[sl].reshape(rows_per_block, dim)[:, 0] = 1.0
                continue_circuit_batch(circ, amps, thetas, starts)
                probs = amps.real ** 2 + amps.imag ** 2
                for i, b in enumerate(chunk):
                    blk = self.blocks[b]
                    rows_b = probs[i * rows_per_block:(i + 1) * rows_per_block]
                    zs = rows_b @ blk.zsign                # (2p, size)
                    dz = 0.5 * (zs[0::2] - zs[1::2])       # (p, size)
                    if blk.intra_w.size:
                        zzs = rows_b @ blk.zzsign
                        dzz = 0.5 * (zzs[0::2] - zzs[1::2])
                        g = dzz @ (-0.5 * blk.intra_w)
                    else:
                        g = np.zeros(p)
                    if blk.cross_w.size:
                        coef = np.bincount(
                            blk.cross_local,
                            weights=-0.5 * blk.cross_w * z[blk.cross_other],
                            minlength=blk.size)
                        g = g + dz @ coef
                    grads.append((b, g))
        grads.sort(key=lambda t: t[0])
        return np.concatenate([g for _, g in grads])


def prepare_state(graph: WeightedGraph, layout: SubsystemLayout,
                  circuits: list[AnsatzCircuit], params) -> DistributedState:
    """Simulate all subsystems for ``params`` (flat vector, block-major) and
    cache the expectations the factorized energy reads."""
    plist = split_params(circuits, params)
    model = _FactorModel(graph, layout, circuits)
    states, z, zz = model.run_blocks(plist)
    return DistributedState(layout=layout, circuits=circuits, params=plist,
                            states=states, z_values=z, zz_values=zz)


def distributed_energy(graph: WeightedGraph, layout: SubsystemLayout,
                       dstate: DistributedState) -> float:
    """Expected cut of the product state: for each edge w/2*(1 - corr) with
    corr the intra-block correlator or the cross-block <Z_i><Z_j> product.
    Exact for product states, no approximation involved."""
    model = _FactorModel(graph, layout, dstate.circuits)
    return model.energy(dstate.z_values, dstate.zz_values)


def energy_gradient(graph: WeightedGraph, layout: SubsystemLayout,
                    circuits: list[AnsatzCircuit], params) -> np.ndarray:
    """Parameter-shift gradient of the distributed energy, flat and
    block-major like ``params``."""
    plist = split_params(circuits, params)
    model = _FactorModel(graph, layout, circuits)
    _, z, _ = model.run_blocks(plist)
    return model.gradient(plist, z)


def optimize(graph: WeightedGraph, layout: SubsystemLayout,
             circuits: list[AnsatzCircuit], init_params=None,
             config: OptimizerConfig | None = None,
             seed=None) -> tuple[np.ndarray, list[float]]:
    """Adam ascent on the distributed energy.

    Returns the best parameters seen (by energy) and the per-iteration energy
    trace. Stops on ``max_iters``, on ``patience`` consecutive energy changes
    below ``energy_tol``, or when the gradient norm drops under ``grad_tol``.
    When ``init_params`` is None they are drawn i.i.d. uniform on [0, 2*pi)
    from ``seed``.
    """
    config = config or OptimizerConfig()
    model = _FactorModel(graph, layout, circuits)
    p_total = total_params(circuits)
    if init_params is None:
        rng = np.random.default_rng(seed)
        flat = rng.uniform(0.0, 2.0 * np.pi, size=p_total)
    else:
        flat = np.asarray(init_params, dtype=np.float64).copy()
        if flat.shape != (p_total,):
            raise ValueError(f"expected {p_total} parameters")

    m = np.zeros(p_total)
    v = np.zeros(p_total)
    trace: list[float] = []
    best_e = -np.inf
    best_params = flat.copy()
    prev_e = None
    stall = 0
    dirty = False  # params updated since last evaluation

    for t in range(1, config.max_iters + 1):
        plist = split_params(circuits, flat)
        _, z, zz = model.run_blocks(plist)
        e = model.energy(z, zz)
        dirty = False
        if not np.isfinite(e):
            err = RuntimeError(f"non-finite energy at iteration {t}")
            err.trace = trace  # type: ignore[attr-defined]
            raise err
        trace.append(e)
        if e > best_e:
            best_e = e
            best_params = flat.copy()
        if prev_e is not None and abs(e - prev_e) < config.energy_tol:
            stall += 1
            if stall >= config.patience:
                break
        else:
            stall = 0
        prev_e = e
        grad = model.gradient(plist, z)
        if float(np.linalg.norm(grad)) < config.grad_tol:
            break
        m = config.beta1 * m + (1.0 - config.beta1) * grad
        v = config.beta2 * v + (1.0 - config.beta2) * grad * grad
        m_hat = m / (1.0 - config.beta1 ** t)
        v_hat = v / (1.0 - config.beta2 ** t)
        flat = flat + config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
        dirty = True

    if dirty:
        plist = split_params(circuits, flat)
        _, z, zz = model.run_blocks(plist)
        e = model.energy(z, zz)
        trace.append(e)
        if e > best_e:
            best_e = e
            best_params = flat.copy()
    return best_params, trace


def write_energy_trace(trace, path) -> None:
    """Energy trace as CSV with an ``iter,energy`` header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iter,energy\n")
        for k, e in enumerate(trace):
            fh.write(f"{k},{e:.17g}\n")


def params_by_block(circuits: list[AnsatzCircuit], params) -> dict[str, list[float]]:
    """Flat parameter vector as JSON-ready arrays keyed by block index."""
    return {str(b): [float(x) for x in p]
            for b, p in enumerate(split_params(circuits, params))}


def decode_solution(dstate: DistributedState, graph: WeightedGraph,
                    m_samples: int, seed=None) -> CutAssignment:
    """Turn the product state into a concrete cut.

    Candidates are the sign-rounded string (bit 1 where <Z> < 0) plus
    ``m_samples`` global strings sampled block-wise from |amplitude|^2; the
    one with the best cut wins, first occurrence breaking ties, so the result
    never falls below the sign-rounded candidate.
    """
    if m_samples < 1:
        raise ValueError("m_samples must be >= 1")
    n = graph.n_vertices
    rng = np.random.default_rng(seed)
    cand = np.zeros((1 + m_samples, n), dtype=np.int8)
    cand[0] = dstate.z_values < 0
    for blk_verts, amps in zip(dstate.layout.blocks, dstate.states):
        size = len(blk_verts)
        probs = amps.real ** 2 + amps.imag ** 2
        probs = np.maximum(probs, 0.0)
        probs /= probs.sum()
        draws = rng.choice(probs.size, size=m_samples, p=probs)
        bits = (draws[:, None] >> np.arange(size)[None, :]) & 1
        cand[1:, np.asarray(blk_verts)] = bits.astype(np.int8)
    cuts = _row_cuts(graph, cand)
    k = int(np.argmax(cuts))
    return CutAssignment.from_bits(graph, cand[k])


def _row_cuts(graph: WeightedGraph, rows: np.ndarray) -> np.ndarray:
    """Cut value of every row of a (batch, n_vertices) bit matrix."""
    m = graph.n_edges
    if m == 0:
        return np.zeros(rows.shape[0])
    out = np.empty(rows.shape[0])
    chunk = max(1, _CHUNK_ELEMS // m)
    for lo in range(0, rows.shape[0], chunk):
        part = rows[lo:lo + chunk]
        crossed = part[:, graph.edge_i] != part[:, graph.edge_j]
        out[lo:lo + chunk] = crossed @ graph.weight
    return out

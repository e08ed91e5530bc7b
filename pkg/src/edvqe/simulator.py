"""Dense statevector simulation of small qubit registers.

Conventions, fixed once for the whole package:
  * qubit 0 is the least-significant bit of the amplitude index;
  * every gate is exp(-i*theta/2 * G) with an involutory generator
    G in {X, Z(x)X, X(x)X}, so all three act as
        |psi> -> cos(theta/2)|psi> - i*sin(theta/2) * G|psi>
    and each parameter admits the exact +-pi/2 parameter-shift rule.

States are mutated in place by gate application; expectation and sampling
are read-only.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a normal install
    _HAVE_NUMBA = False

MAX_QUBITS = 20

GATE_ARITY = {"rx": 1, "rzx": 2, "rxx": 2}


@dataclass(frozen=True)
class Gate:
    """One parameterized rotation; ``param_index`` points into a shared
    parameter vector. For ``rzx`` the first qubit carries Z, the second X."""

    kind: str
    qubits: tuple[int, ...]
    param_index: int

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != GATE_ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {GATE_ARITY[self.kind]} qubit(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("gate qubits must be distinct")
        if self.param_index < 0:
            raise ValueError("param_index must be non-negative")


@dataclass(frozen=True)
class AnsatzCircuit:
    """Ordered gate list over one register, reading an ``n_params`` vector."""

    n_qubits: int
    gates: tuple[Gate, ...]
    n_params: int

    def __post_init__(self):
        used = set()
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise ValueError("gate qubit index out of range")
            if g.param_index >= self.n_params:
                raise ValueError("gate param_index out of range")
            used.add(g.param_index)
        if self.n_params and used != set(range(self.n_params)):
            raise ValueError("every parameter must be used by at least one gate")


class Statevector:
    """Complex amplitude vector over ``2**n_qubits`` basis states."""

    __slots__ = ("n_qubits", "amps")

    def __init__(self, n_qubits: int, amps: np.ndarray):
        if amps.shape != (1 << n_qubits,):
            raise ValueError("amplitude length must be 2**n_qubits")
        self.n_qubits = n_qubits
        self.amps = np.asarray(amps, dtype=np.complex128)

    def norm(self) -> float:
        a = self.amps
        return float(np.sqrt((a.real * a.real + a.imag * a.imag).sum()))

    def probabilities(self) -> np.ndarray:
        a = self.amps
        return a.real * a.real + a.imag * a.imag

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amps.copy())


def init_state(n_qubits: int) -> Statevector:
    """|0...0> reference state."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must lie in [1, {MAX_QUBITS}]")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


# ---------------------------------------------------------------------------
# rotation kernel
#
# Every supported generator is a signed basis permutation:
#   P|x> = sign(x) |x XOR flip_mask>, with sign(x) = (-1)^{bit z_qubit of x}
# for rzx and sign = +1 otherwise. The kernel handles 1-D states and 2-D
# (batch, dim) blocks with one angle per batch row.
# ---------------------------------------------------------------------------

def _gate_action(kind: str, qubits: tuple[int, ...]) -> tuple[int, int | None]:
    if kind == "rx":
        return 1 << qubits[0], None
    if kind == "rxx":
        return (1 << qubits[0]) | (1 << qubits[1]), None
    # rzx: Z on qubits[0], X on qubits[1]
    return 1 << qubits[1], qubits[0]


def _rotate(amps: np.ndarray, theta, flip_mask: int, z_qubit: int | None) -> None:
    dim = amps.shape[-1]
    idx = np.arange(dim)
    perm = amps[..., idx ^ flip_mask]  # fancy indexing copies
    if z_qubit is not None:
        sign = 1.0 - 2.0 * ((idx >> z_qubit) & 1)
        perm *= sign
    half = 0.5 * np.asarray(theta, dtype=np.float64)
    c = np.cos(half)
    s = np.sin(half)
    if amps.ndim == 2:
        c = c.reshape(-1, 1)
        s = s.reshape(-1, 1)
    amps *= c
    amps -= (1j * s) * perm


def _check_qubit(state: Statevector, q: int) -> None:
    if not 0 <= q < state.n_qubits:
        raise ValueError(f"qubit {q} out of range for {state.n_qubits}-qubit state")


def apply_rx(state: Statevector, q: int, theta: float) -> Statevector:
    """exp(-i*theta/2 * X_q); on |0> it drives <Z_q> to cos(theta)."""
    _check_qubit(state, q)
    _rotate(state.amps, theta, 1 << q, None)
    return state


def apply_rxx(state: Statevector, q1: int, q2: int, theta: float) -> Statevector:
    """exp(-i*theta/2 * X_q1 X_q2): cos(theta/2) on the diagonal and
    -i*sin(theta/2) on the anti-diagonal of each 4-state subspace; theta=pi
    swaps the pair's basis states up to a global -i phase."""
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise ValueError("rxx needs two distinct qubits")
    _rotate(state.amps, theta, (1 << q1) | (1 << q2), None)
    return state


def apply_rzx(state: Statevector, q1: int, q2: int, theta: float) -> Statevector:
    """exp(-i*theta/2 * Z_q1 X_q2): RX(theta) on q2 when q1 is |0>,
    RX(-theta) when q1 is |1>."""
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise ValueError("rzx needs two distinct qubits")
    _rotate(state.amps, theta, 1 << q2, q1)
    return state


def run_circuit(circuit: AnsatzCircuit, params) -> Statevector:
    """Prepare |0...0> and apply the circuit's gates in order."""
    vec = np.asarray(params, dtype=np.float64)
    if vec.shape != (circuit.n_params,):
        raise ValueError(f"expected {circuit.n_params} parameters, got {vec.shape}")
    state = init_state(circuit.n_qubits)
    for g in circuit.gates:
        flip, zq = _gate_action(g.kind, g.qubits)
        _rotate(state.amps, vec[g.param_index], flip, zq)
    return state


# Per-gate dispatch tables for the batched runner: kind code 0=rx, 1=rxx,
# 2=rzx; m1/m2 carry single-bit masks (for rzx: m1 flips, m2 signs).
@functools.lru_cache(maxsize=256)
def _circuit_plan(circuit: AnsatzCircuit):
    g_count = len(circuit.gates)
    kinds = np.zeros(g_count, dtype=np.uint8)
    m1 = np.zeros(g_count, dtype=np.int64)
    m2 = np.zeros(g_count, dtype=np.int64)
    pidx = np.zeros(g_count, dtype=np.int64)
    for k, g in enumerate(circuit.gates):
        pidx[k] = g.param_index
        if g.kind == "rx":
            kinds[k] = 0
            m1[k] = 1 << g.qubits[0]
        elif g.kind == "rxx":
            kinds[k] = 1
            lo, hi = sorted(g.qubits)
            m1[k] = 1 << lo
            m2[k] = 1 << hi
        else:  # rzx
            kinds[k] = 2
            m1[k] = 1 << g.qubits[1]
            m2[k] = 1 << g.qubits[0]
    return kinds, m1, m2, pidx


if _HAVE_NUMBA:

    @njit(cache=True, fastmath=True, nogil=True)
    def _apply_gate(row, c, s, kind, b1, b2):  # pragma: no cover
        dim = row.size
        if kind == 0:  # rx, flip bit b1
            for base in range(0, dim, b1 << 1):
                for x in range(base, base + b1):
                    y = x + b1
                    ax = row[x]
                    ay = row[y]
                    row[x] = c * ax - 1j * (s * ay)
                    row[y] = c * ay - 1j * (s * ax)
        elif kind == 1:  # rxx on bits b1 < b2: pairs (00,11) and (01,10)
            for hi in range(0, dim, b2 << 1):
                for lo in range(hi, hi + b2, b1 << 1):
                    for x in range(lo, lo + b1):
                        i01 = x + b1
                        i10 = x + b2
                        i11 = i01 + b2
                        a00 = row[x]
                        a01 = row[i01]
                        a10 = row[i10]
                        a11 = row[i11]
                        row[x] = c * a00 - 1j * (s * a11)
                        row[i11] = c * a11 - 1j * (s * a00)
                        row[i01] = c * a01 - 1j * (s * a10)
                        row[i10] = c * a10 - 1j * (s * a01)
        else:  # rzx: flip bit b1, sign from bit b2 (shared within a pair)
            for base in range(0, dim, b1 << 1):
                for x in range(base, base + b1):
                    y = x + b1
                    sg = -s if x & b2 else s
                    ax = row[x]
                    ay = row[y]
                    row[x] = c * ax - 1j * (sg * ay)
                    row[y] = c * ay - 1j * (sg * ax)

    @njit(cache=True, fastmath=True, nogil=True)
    def _batch_kernel(amps, thetas, kinds, m1, m2, pidx, starts):  # pragma: no cover
        for b in range(amps.shape[0]):
            row = amps[b]
            for g in range(starts[b], kinds.size):
                half = 0.5 * thetas[b, pidx[g]]
                _apply_gate(row, np.cos(half), np.sin(half), kinds[g], m1[g], m2[g])

    @njit(cache=True, fastmath=True, nogil=True)
    def _prefix_kernel(out, theta, kinds, m1, m2, pidx):  # pragma: no cover
        for g in range(kinds.size):
            out[g + 1, :] = out[g, :]
            half = 0.5 * theta[pidx[g]]
            _apply_gate(out[g + 1], np.cos(half), np.sin(half),
                        kinds[g], m1[g], m2[g])


def run_circuit_batch(circuit: AnsatzCircuit, params: np.ndarray) -> np.ndarray:
    """Run one circuit for many parameter vectors at once.

    ``params`` has shape (batch, n_params); returns amplitudes of shape
    (batch, 2**n_qubits). Row k of the output equals
    ``run_circuit(circuit, params[k]).amps``. Rows are streamed through the
    whole gate list so each statevector stays cache-resident.
    """
    mat = np.ascontiguousarray(params, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[1] != circuit.n_params:
        raise ValueError("params must have shape (batch, n_params)")
    dim = 1 << circuit.n_qubits
    amps = np.zeros((mat.shape[0], dim), dtype=np.complex128)
    amps[:, 0] = 1.0
    continue_circuit_batch(circuit, amps, mat,
                           np.zeros(mat.shape[0], dtype=np.int64))
    return amps


def continue_circuit_batch(circuit: AnsatzCircuit, amps: np.ndarray,
                           params: np.ndarray, starts: np.ndarray) -> None:
    """Apply gates ``starts[b]`` .. end of the circuit to row b, in place.

    Lets shifted-parameter evaluations resume from a cached prefix state
    instead of replaying the whole circuit (a shift of parameter k only
    changes the circuit from the first gate reading k onward).
    """
    if not circuit.gates:
        return
    mat = np.ascontiguousarray(params, dtype=np.float64)
    if _HAVE_NUMBA:
        kinds, m1, m2, pidx = _circuit_plan(circuit)
        _batch_kernel(amps, mat, kinds, m1, m2, pidx,
                      np.ascontiguousarray(starts, dtype=np.int64))
        return
    for g_idx in range(len(circuit.gates)):
        g = circuit.gates[g_idx]
        active = starts <= g_idx
        if not active.any():
            continue
        flip, zq = _gate_action(g.kind, g.qubits)
        block = amps[active]
        _rotate(block, mat[active, g.param_index], flip, zq)
        amps[active] = block


def run_circuit_prefixes(circuit: AnsatzCircuit, params: np.ndarray) -> np.ndarray:
    """All intermediate states of one run: row g is the state after the first
    g gates (row 0 is |0...0>), shape (n_gates + 1, 2**n_qubits)."""
    vec = np.ascontiguousarray(params, dtype=np.float64)
    if vec.shape != (circuit.n_params,):
        raise ValueError(f"expected {circuit.n_params} parameters")
    dim = 1 << circuit.n_qubits
    out = np.zeros((len(circuit.gates) + 1, dim), dtype=np.complex128)
    out[0, 0] = 1.0
    if _HAVE_NUMBA and circuit.gates:
        kinds, m1, m2, pidx = _circuit_plan(circuit)
        _prefix_kernel(out, vec, kinds, m1, m2, pidx)
        return out
    for g_idx, g in enumerate(circuit.gates):
        out[g_idx + 1] = out[g_idx]
        flip, zq = _gate_action(g.kind, g.qubits)
        _rotate(out[g_idx + 1], vec[g.param_index], flip, zq)
    return out


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------

def z_signs(n_qubits: int, q: int) -> np.ndarray:
    """Diagonal of Z_q over the computational basis (+1/-1 per index)."""
    idx = np.arange(1 << n_qubits)
    return 1.0 - 2.0 * ((idx >> q) & 1)


def expect_z(state: Statevector, q: int) -> float:
    _check_qubit(state, q)
    return float(np.dot(state.probabilities(), z_signs(state.n_qubits, q)))


def expect_zz(state: Statevector, q1: int, q2: int) -> float:
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise ValueError("expect_zz needs two distinct qubits")
    sign = z_signs(state.n_qubits, q1) * z_signs(state.n_qubits, q2)
    return float(np.dot(state.probabilities(), sign))


def sample_bits(state: Statevector, m: int, seed=None) -> np.ndarray:
    """Draw ``m`` basis states from |amplitude|^2; returns an (m, n_qubits)
    array of bits with column q holding qubit q."""
    if m < 1:
        raise ValueError("m must be >= 1")
    p = state.probabilities()
    p = np.maximum(p, 0.0)
    p /= p.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(p.size, size=m, p=p)
    qubits = np.arange(state.n_qubits)
    return ((draws[:, None] >> qubits[None, :]) & 1).astype(np.int8)


def dump_amplitudes(state: Statevector) -> str:
    """Debug dump: one ``index re im`` line per basis state."""
    lines = [f"{k} {a.real:.17g} {a.imag:.17g}" for k, a in enumerate(state.amps)]
    return "\n".join(lines) + "\n"

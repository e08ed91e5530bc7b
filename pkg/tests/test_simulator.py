import numpy as np
import pytest

from edvqe.simulator import (Statevector, Gate, AnsatzCircuit, init_state,
                             apply_rx, apply_rxx, apply_rzx, run_circuit,
                             run_circuit_batch, run_circuit_prefixes,
                             continue_circuit_batch, expect_z, expect_zz,
                             sample_bits, dump_amplitudes)


def paper_rxx_matrix(theta):
    c = np.cos(theta / 2)
    s = -1j * np.sin(theta / 2)
    return np.array([[c, 0, 0, s],
                     [0, c, s, 0],
                     [0, s, c, 0],
                     [s, 0, 0, c]])


def basis(n, k):
    s = init_state(n)
    s.amps[:] = 0.0
    s.amps[k] = 1.0
    return s


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    amps /= np.linalg.norm(amps)
    return Statevector(n, amps)


def test_init_state():
    s = init_state(1)
    assert np.array_equal(s.amps, [1, 0])
    s3 = init_state(3)
    assert s3.amps.size == 8 and s3.amps[0] == 1.0
    assert s3.norm() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        init_state(0)
    with pytest.raises(ValueError):
        init_state(21)


def test_rx_basics():
    s = init_state(1)
    apply_rx(s, 0, np.pi)
    assert np.allclose(s.amps, [0, -1j], atol=1e-12)
    assert expect_z(s, 0) == pytest.approx(-1.0)
    s = init_state(1)
    apply_rx(s, 0, 0.0)
    assert np.allclose(s.amps, [1, 0], atol=1e-15)
    s = init_state(1)
    apply_rx(s, 0, np.pi / 2)
    assert expect_z(s, 0) == pytest.approx(0.0, abs=1e-12)


def test_rx_composition():
    rng = np.random.default_rng(0)
    for _ in range(10):
        a, b = rng.uniform(-2 * np.pi, 2 * np.pi, 2)
        s1 = random_state(3, 4)
        s2 = Statevector(3, s1.amps.copy())
        apply_rx(apply_rx(s1, 1, a), 1, b)
        apply_rx(s2, 1, a + b)
        assert np.allclose(s1.amps, s2.amps, atol=1e-12)


def test_rxx_matches_reference_matrix():
    for theta in (0.0, np.pi / 2, np.pi, 0.7, -1.3):
        ref = paper_rxx_matrix(theta)
        built = np.zeros((4, 4), dtype=complex)
        for col in range(4):
            s = basis(2, col)
            apply_rxx(s, 0, 1, theta)
            built[:, col] = s.amps
        assert np.abs(built - ref).max() < 1e-12


def test_rxx_examples():
    s = random_state(2, 1)
    before = s.amps.copy()
    apply_rxx(s, 0, 1, 0.0)
    assert np.allclose(s.amps, before, atol=1e-15)

    # |01> (qubit 0 set) -> -i |10> (qubit 1 set)
    s = basis(2, 1)
    apply_rxx(s, 0, 1, np.pi)
    expected = np.zeros(4, dtype=complex)
    expected[2] = -1j
    assert np.allclose(s.amps, expected, atol=1e-12)

    s = init_state(2)
    apply_rxx(s, 0, 1, np.pi / 2)
    expected = np.array([1, 0, 0, -1j]) / np.sqrt(2)
    assert np.allclose(s.amps, expected, atol=1e-12)

    with pytest.raises(ValueError):
        apply_rxx(init_state(2), 1, 1, 0.3)


def test_rzx_controls_rotation_sign():
    theta = 0.9
    # control |0>: acts as RX(theta) on target
    s = init_state(2)
    apply_rzx(s, 0, 1, theta)
    ref = init_state(2)
    apply_rx(ref, 1, theta)
    assert np.allclose(s.amps, ref.amps, atol=1e-12)
    # control |1>: acts as RX(-theta)
    s = basis(2, 1)
    apply_rzx(s, 0, 1, theta)
    ref = basis(2, 1)
    apply_rx(ref, 1, -theta)
    assert np.allclose(s.amps, ref.amps, atol=1e-12)
    # flipping the target with the control at |0...>
    s = init_state(2)
    apply_rzx(s, 0, 1, np.pi)
    assert expect_z(s, 1) == pytest.approx(-1.0)
    assert expect_z(s, 0) == pytest.approx(1.0)


def test_norm_preserved_random_circuit():
    rng = np.random.default_rng(3)
    s = random_state(5, 9)
    for _ in range(50):
        kind = rng.choice(["rx", "rxx", "rzx"])
        theta = rng.uniform(-np.pi, np.pi)
        if kind == "rx":
            apply_rx(s, int(rng.integers(5)), theta)
        else:
            q1, q2 = rng.choice(5, size=2, replace=False)
            if kind == "rxx":
                apply_rxx(s, int(q1), int(q2), theta)
            else:
                apply_rzx(s, int(q1), int(q2), theta)
    assert abs(s.norm() - 1.0) < 1e-10


def test_expectations_against_dense_oracle():
    # oracle: build the diagonal of Z_q / Z_q Z_r explicitly and contract
    for n in (2, 4, 6):
        s = random_state(n, n)
        p = s.probabilities()
        idx = np.arange(1 << n)
        for q in range(n):
            diag = 1.0 - 2.0 * ((idx >> q) & 1)
            assert expect_z(s, q) == pytest.approx(float(p @ diag), abs=1e-12)
        for q1 in range(n):
            for q2 in range(q1 + 1, n):
                diag = (1.0 - 2.0 * ((idx >> q1) & 1)) * (1.0 - 2.0 * ((idx >> q2) & 1))
                assert expect_zz(s, q1, q2) == pytest.approx(float(p @ diag), abs=1e-12)


def test_expect_entangled_pair():
    s = init_state(2)
    apply_rxx(s, 0, 1, np.pi / 2)  # (|00> - i|11>)/sqrt(2)
    assert expect_zz(s, 0, 1) == pytest.approx(1.0)
    assert expect_z(s, 0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        expect_zz(s, 1, 1)


def test_run_circuit():
    circ = AnsatzCircuit(2, (), 0)
    s = run_circuit(circ, [])
    assert np.allclose(s.amps, [1, 0, 0, 0])

    gates = (Gate("rx", (0,), 0), Gate("rx", (1,), 1), Gate("rzx", (0, 1), 2))
    circ = AnsatzCircuit(2, gates, 3)
    s = run_circuit(circ, [0.0, 0.0, 0.0])
    assert np.allclose(s.amps, [1, 0, 0, 0], atol=1e-15)

    s = run_circuit(circ, [np.pi, 0.0, 0.0])
    assert expect_z(s, 0) == pytest.approx(-1.0)
    assert expect_z(s, 1) == pytest.approx(1.0)

    with pytest.raises(ValueError):
        run_circuit(circ, [0.0, 0.0])


def test_circuit_validation():
    with pytest.raises(ValueError):
        Gate("ry", (0,), 0)
    with pytest.raises(ValueError):
        Gate("rxx", (0,), 0)
    with pytest.raises(ValueError):
        Gate("rxx", (1, 1), 0)
    with pytest.raises(ValueError):
        AnsatzCircuit(1, (Gate("rx", (1,), 0),), 1)
    with pytest.raises(ValueError):
        AnsatzCircuit(2, (Gate("rx", (0,), 0),), 2)  # param 1 unused


def test_batch_matches_single_runs():
    rng = np.random.default_rng(11)
    gates = []
    p = 0
    for q in range(4):
        gates.append(Gate("rx", (q,), p)); p += 1
    for q in range(3):
        gates.append(Gate("rzx", (q, q + 1), p)); p += 1
    gates.append(Gate("rxx", (0, 3), p)); p += 1
    circ = AnsatzCircuit(4, tuple(gates), p)
    mat = rng.uniform(-np.pi, np.pi, (7, p))
    batch = run_circuit_batch(circ, mat)
    for k in range(7):
        assert np.allclose(batch[k], run_circuit(circ, mat[k]).amps, atol=1e-12)


def test_prefixes_and_continue():
    rng = np.random.default_rng(2)
    circ = AnsatzCircuit(3, (Gate("rx", (0,), 0), Gate("rzx", (0, 1), 1),
                            Gate("rxx", (1, 2), 2), Gate("rx", (2,), 3)), 4)
    params = rng.uniform(-np.pi, np.pi, 4)
    pre = run_circuit_prefixes(circ, params)
    assert pre.shape == (5, 8)
    assert np.allclose(pre[4], run_circuit(circ, params).amps, atol=1e-12)
    # restart from the prefix before gate 2 and continue: must equal full run
    amps = np.stack([pre[2].copy(), pre[0].copy()])
    continue_circuit_batch(circ, amps, np.stack([params, params]),
                           np.array([2, 0]))
    assert np.allclose(amps[0], pre[4], atol=1e-12)
    assert np.allclose(amps[1], pre[4], atol=1e-12)


def test_sample_bits():
    s = init_state(3)
    out = sample_bits(s, 20, seed=0)
    assert out.shape == (20, 3)
    assert not out.any()

    s = init_state(1)
    apply_rx(s, 0, np.pi)
    assert sample_bits(s, 10, seed=1).all()

    s = init_state(1)
    apply_rx(s, 0, np.pi / 2)
    frac = sample_bits(s, 10000, seed=2).mean()
    assert abs(frac - 0.5) < 0.05

    a = sample_bits(s, 50, seed=3)
    b = sample_bits(s, 50, seed=3)
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        sample_bits(s, 0, seed=0)


def test_sample_bits_chi_square():
    # empirical frequencies converge to |amp|^2 (m = 1e5, fixed seed)
    s = random_state(3, 21)
    p = s.probabilities()
    m = 100_000
    bits = sample_bits(s, m, seed=4)
    idx = (bits * (1 << np.arange(3))).sum(axis=1)
    counts = np.bincount(idx, minlength=8)
    chi2 = float((((counts - m * p) ** 2) / (m * p)).sum())
    # df = 7; p = 0.001 cutoff is 24.3
    assert chi2 < 24.3


def test_dump_amplitudes():
    s = init_state(1)
    text = dump_amplitudes(s)
    lines = text.strip().splitlines()
    assert lines[0].split() == ["0", "1", "0"]
    assert lines[1].split() == ["1", "0", "0"]


def test_numpy_fallback_matches_jit_path(monkeypatch):
    import edvqe.simulator as sim
    rng = np.random.default_rng(6)
    circ = AnsatzCircuit(4, (Gate("rx", (0,), 0), Gate("rzx", (0, 1), 1),
                            Gate("rxx", (1, 3), 2), Gate("rx", (2,), 3),
                            Gate("rzx", (3, 2), 4)), 5)
    mat = rng.uniform(-np.pi, np.pi, (6, 5))
    fast = run_circuit_batch(circ, mat)
    pre_fast = run_circuit_prefixes(circ, mat[0])
    cont_fast = np.stack([pre_fast[2].copy(), pre_fast[0].copy()])
    continue_circuit_batch(circ, cont_fast, np.stack([mat[0], mat[0]]),
                           np.array([2, 0]))

    monkeypatch.setattr(sim, "_HAVE_NUMBA", False)
    slow = sim.run_circuit_batch(circ, mat)
    pre_slow = sim.run_circuit_prefixes(circ, mat[0])
    cont_slow = np.stack([pre_slow[2].copy(), pre_slow[0].copy()])
    sim.continue_circuit_batch(circ, cont_slow, np.stack([mat[0], mat[0]]),
                               np.array([2, 0]))
    assert np.allclose(fast, slow, atol=1e-13)
    assert np.allclose(pre_fast, pre_slow, atol=1e-13)
    assert np.allclose(cont_fast, cont_slow, atol=1e-13)

import numpy as np
import pytest

from edvqe.graphs import cut_value
from edvqe.engine import OptimizerConfig
from edvqe.perturb import EdvqeConfig
from edvqe.phasing import (FragmentMatrix, load_fragments, write_fragments,
                           read_truth, write_truth, build_conflict_graph,
                           consensus, mec_score, switch_error_rate,
                           hamming_error_rate, completeness, phase,
                           comparison_report, gen_synthetic_diploid)


def test_fragment_matrix_validation():
    m = FragmentMatrix([[1, -1, 0], [-1, 1, 0]])
    assert m.n_reads == 2 and m.n_sites == 3
    assert m.read_entries(0) == {0: 1, 1: -1}
    with pytest.raises(ValueError):
        FragmentMatrix([[0, 0, 0], [1, 0, 0]])  # empty read
    with pytest.raises(ValueError):
        FragmentMatrix([[2, 0, 0]])


def test_load_fragments_dense(tmp_path):
    p = tmp_path / "frags.csv"
    p.write_text("1,-1,0\n-1,1,0\n")
    m = load_fragments(p)
    assert m.n_reads == 2 and m.n_sites == 3
    assert m.read_entries(0) == {0: 1, 1: -1}

    # whitespace variant
    p.write_text("1 -1 0\n-1 1 0\n")
    m2 = load_fragments(p)
    assert np.array_equal(m.values, m2.values)

    p.write_text("")
    with pytest.raises(ValueError, match="empty"):
        load_fragments(p)
    p.write_text("1,-1\n1\n")
    with pytest.raises(ValueError, match=":2"):
        load_fragments(p)
    p.write_text("1,7\n")
    with pytest.raises(ValueError, match=":1"):
        load_fragments(p)


def test_load_fragments_sparse(tmp_path):
    p = tmp_path / "frags.txt"
    p.write_text("r0 0:1 2:-1\nr1 1:1 2:1\n")
    m = load_fragments(p)
    assert m.n_reads == 2 and m.n_sites == 3
    assert m.read_entries(0) == {0: 1, 2: -1}
    p.write_text("r0 0:5\n")
    with pytest.raises(ValueError, match=":1"):
        load_fragments(p)


def test_fragments_round_trip(tmp_path):
    frags, _ = gen_synthetic_diploid(20, 15, 5, 0.1, seed=3)
    p = tmp_path / "rt.csv"
    write_fragments(frags, p)
    again = load_fragments(p)
    assert np.array_equal(frags.values, again.values)


def test_truth_round_trip(tmp_path):
    truth = np.array([1, -1, 1, 1, -1], dtype=np.int8)
    p = tmp_path / "truth.txt"
    write_truth(truth, p)
    assert np.array_equal(read_truth(p), truth)


def test_conflict_graph_modes():
    # two reads on the same two sites with opposite entries: d=2, a=0
    m = FragmentMatrix([[1, 1], [-1, -1]])
    for mode in ("signed", "discordant"):
        g = build_conflict_graph(m, mode)
        assert g.n_edges == 1
        assert g.weight[0] == 2.0

    # identical reads: d=0, a=2
    m = FragmentMatrix([[1, 1], [1, 1]])
    assert build_conflict_graph(m, "discordant").n_edges == 0
    signed = build_conflict_graph(m, "signed")
    assert signed.n_edges == 1
    assert signed.weight[0] == -2.0

    # disjoint reads never connect
    m = FragmentMatrix([[1, 0], [0, 1]])
    assert build_conflict_graph(m, "signed").n_edges == 0
    with pytest.raises(ValueError):
        build_conflict_graph(m, "other")


def test_conflict_graph_read_order_symmetry():
    rng = np.random.default_rng(44)
    frags, _ = gen_synthetic_diploid(15, 12, 4, 0.1, seed=6)
    perm = rng.permutation(frags.n_reads)
    shuffled = FragmentMatrix(frags.values[perm])
    g = build_conflict_graph(frags)
    h = build_conflict_graph(shuffled)
    # edges map onto each other under the read permutation
    inv = np.argsort(perm)

    def canon(graph, relabel):
        out = set()
        for i, j, w in zip(graph.edge_i, graph.edge_j, graph.weight):
            a, b = relabel[i], relabel[j]
            out.add((min(a, b), max(a, b), w))
        return out

    assert canon(g, np.arange(frags.n_reads)) == canon(h, perm)


def test_consensus_votes():
    m = FragmentMatrix([[1, 1, 0, 0],
                        [1, -1, 0, 0],
                        [1, 0, 0, 0],
                        [-1, 0, -1, 0]])
    bits = np.array([0, 0, 0, 1])
    h1, h2 = consensus(m, bits)
    assert h1[0] == 1          # unanimous in partition 0
    assert h1[1] == 0          # 1 vs -1 tie, partition 1 silent -> unphased
    assert h1[2] == 1          # partition-1 read says -1, complement is +1
    assert h1[3] == 0          # covered by nobody
    assert np.array_equal(h2, -h1)
    with pytest.raises(ValueError):
        consensus(m, np.array([0, 1]))


def test_mec_score():
    truth = np.array([1, -1, 1], dtype=np.int8)
    m = FragmentMatrix([[1, -1, 1], [-1, 1, -1]])  # exact h1 and h2 copies
    assert mec_score(m, truth, -truth) == 0
    m2 = FragmentMatrix([[1, 1, 1], [-1, 1, -1]])  # one flipped entry
    assert mec_score(m2, truth, -truth) == 1
    assert mec_score(m2, -truth, truth) == 1  # swap-invariant
    with pytest.raises(ValueError):
        mec_score(m, truth, truth)


def test_switch_and_hamming_rates():
    truth = np.ones(11, dtype=np.int8)
    assert switch_error_rate(truth, truth) == 0.0
    assert hamming_error_rate(truth, truth) == 0.0
    assert switch_error_rate(-truth, truth) == 0.0  # relabeling
    assert hamming_error_rate(-truth, truth) == 0.0

    # one switch at the midpoint of 11 sites: agreement flips once
    pred = truth.copy()
    pred[5:] = -1
    assert switch_error_rate(pred, truth) == pytest.approx(1.0 / 10.0)
    assert hamming_error_rate(pred, truth) == pytest.approx(5.0 / 11.0)

    short = np.array([1, 0, 0], dtype=np.int8)
    assert switch_error_rate(short, truth[:3]) is None


def test_rates_relabel_invariance():
    rng = np.random.default_rng(5)
    for _ in range(20):
        pred = rng.choice([-1, 0, 1], size=15).astype(np.int8)
        truth = rng.choice([-1, 1], size=15).astype(np.int8)
        if ((pred != 0) & (truth != 0)).sum() < 2:
            continue
        assert switch_error_rate(pred, truth) == switch_error_rate(-pred, truth)
        assert hamming_error_rate(pred, truth) == hamming_error_rate(-pred, truth)


def test_completeness():
    m = FragmentMatrix([[1, -1, 0]])
    assert completeness(np.array([1, -1, 0], dtype=np.int8), m) == 1.0
    assert completeness(np.array([1, 0, 0], dtype=np.int8), m) == 0.5
    assert completeness(np.array([0, 0, 1], dtype=np.int8), m) == 0.0


def test_gen_synthetic_diploid():
    frags, truth = gen_synthetic_diploid(30, 40, 6, 0.0, seed=9)
    assert frags.n_reads == 40 and frags.n_sites == 30
    assert truth.size == 30
    frags2, truth2 = gen_synthetic_diploid(30, 40, 6, 0.0, seed=9)
    assert np.array_equal(frags.values, frags2.values)
    assert np.array_equal(truth, truth2)
    # every read is a window of h1 or h2
    for r in range(frags.n_reads):
        row = frags.values[r]
        covered = np.nonzero(row)[0]
        prods = row[covered] * truth[covered]
        assert (prods == prods[0]).all()
    with pytest.raises(ValueError):
        gen_synthetic_diploid(10, 5, 1, 0.0, seed=0)
    with pytest.raises(ValueError):
        gen_synthetic_diploid(10, 5, 11, 0.0, seed=0)


def test_phase_clean_data_brute():
    frags, truth = gen_synthetic_diploid(14, 14, 5, 0.0, seed=21)
    result = phase(frags, solver="brute", seed=0, truth_h1=truth)
    assert result.mec == 0
    assert result.completeness == 1.0
    assert result.switch_error == 0.0
    assert result.hamming_error == 0.0
    # partition cut is consistent with its bits
    assert result.read_partition.cut == pytest.approx(
        cut_value(build_conflict_graph(frags), result.read_partition.bits))


def test_phase_single_read():
    m = FragmentMatrix([[1, -1, 0, 0]])
    result = phase(m, solver="brute", seed=0)
    assert result.mec == 0
    assert result.completeness == 1.0
    assert np.array_equal(result.h1[:2], [1, -1])


def test_phase_gw_and_edvqe_clean():
    frags, truth = gen_synthetic_diploid(16, 18, 5, 0.0, seed=33)
    for solver, cfg in (("gw", None),
                        ("edvqe", EdvqeConfig(
                            subsystem_size=6,
                            inner_optimizer=OptimizerConfig(
                                learning_rate=0.08, max_iters=60,
                                energy_tol=1e-5, patience=8),
                            qp2_optimizer=OptimizerConfig(
                                learning_rate=0.05, max_iters=40,
                                energy_tol=1e-5, patience=8),
                            m_samples=64, max_outer_iters=4,
                            outer_patience=2))):
        result = phase(frags, solver=solver, solver_config=cfg, seed=1,
                       truth_h1=truth)
        assert result.mec == 0, solver
        assert result.completeness == 1.0


def test_phase_noisy_data_has_errors():
    frags, truth = gen_synthetic_diploid(30, 80, 7, 0.05, seed=11)
    result = phase(frags, solver="gw", seed=2, truth_h1=truth)
    assert result.mec > 0
    assert result.completeness > 0.9
    assert result.switch_error <= 0.1


def test_phase_brute_minimizes_mec_proxy():
    """MaxCut on the signed conflict graph is a proxy for MEC minimization;
    on clean instances it should find the MEC-optimal partition nearly
    always. Oracle: enumerate every read partition."""
    rng = np.random.default_rng(71)
    agree = 0
    trials = 20
    for t in range(trials):
        frags, _ = gen_synthetic_diploid(10, 11, 4, 0.0, seed=1000 + t)
        result = phase(frags, solver="brute", seed=t)
        best_mec = min(_partition_mec(frags, x) for x in range(1 << (frags.n_reads - 1)))
        agree += result.mec == best_mec
    assert agree >= 0.9 * trials


def _partition_mec(frags, x):
    bits = np.array([(x >> r) & 1 for r in range(frags.n_reads)], dtype=np.int8)
    h1, h2 = consensus(frags, bits)
    return mec_score(frags, h1, h2)


def test_phasing_result_to_dict():
    frags, truth = gen_synthetic_diploid(12, 10, 4, 0.0, seed=2)
    result = phase(frags, solver="brute", seed=0, truth_h1=truth)
    d = result.to_dict()
    assert set(d) >= {"n_reads", "cut_value", "partition", "h1", "h2", "mec",
                      "completeness", "switch_error_rate", "hamming_error_rate"}
    assert len(d["partition"]) == 10
    assert set(d["h1"]) <= {"0", "1", "?"}
    import json
    json.dumps(d)


def test_comparison_report():
    rep = comparison_report([90.0, 100.0, 100.0, 80.0], 100.0)
    assert rep["best_value_found"] == 100.0
    assert rep["avg_cut_value"] == pytest.approx(92.5)
    assert rep["success_rate"] == pytest.approx(0.5)
    assert rep["avg_approximation_ratio"] == pytest.approx(0.925)
    with pytest.raises(ValueError):
        comparison_report([], 10.0)

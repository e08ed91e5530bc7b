"""Distributed variational MaxCut solver with hybrid classical-quantum
refinement, a Goemans-Williamson baseline, and MaxCut-based haplotype
phasing."""

from .graphs import (
    WeightedGraph,
    CutAssignment,
    IsingModel,
    cut_value,
    normalized_avg_cut,
    to_ising,
    gen_complete,
    gen_cluster,
    gen_regular,
    brute_force_maxcut,
    read_graph,
    write_graph,
)
from .simulator import (
    Statevector,
    Gate,
    AnsatzCircuit,
    init_state,
    apply_rx,
    apply_rxx,
    apply_rzx,
    run_circuit,
    run_circuit_batch,
    expect_z,
    expect_zz,
    sample_bits,
    dump_amplitudes,
)
from .engine import (
    SubsystemLayout,
    OptimizerConfig,
    DistributedState,
    partition_vertices,
    build_ansatz,
    prepare_state,
    distributed_energy,
    energy_gradient,
    optimize,
    decode_solution,
)
from .perturb import (
    EdvqeConfig,
    SolveResult,
    flip_delta,
    all_flip_deltas,
    cns1,
    build_qp2,
    qp2_optimize,
    edvqe_solve,
    warm_start_solve,
)
from .gw import (
    GwConfig,
    EmbeddingSolution,
    bm_solve,
    hyperplane_round,
    gw_solve,
    gw_runs,
)
from .phasing import (
    FragmentMatrix,
    PhasingResult,
    load_fragments,
    write_fragments,
    read_truth,
    write_truth,
    build_conflict_graph,
    consensus,
    mec_score,
    switch_error_rate,
    hamming_error_rate,
    completeness,
    phase,
    comparison_report,
    gen_synthetic_diploid,
)

__version__ = "0.1.0"

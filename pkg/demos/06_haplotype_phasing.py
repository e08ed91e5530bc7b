"""Haplotype phasing as MaxCut on a read-conflict graph.

Synthetic diploid fragments are split into the two parental groups by
cutting the signed conflict graph; per-site majority voting yields the
phased haplotypes, scored by MEC, completeness, switch and Hamming rates.
"""
import numpy as np

import edvqe as E

# clean reads: 150 fragments of length 8 over 60 heterozygous sites
frags, truth = E.gen_synthetic_diploid(n_sites=60, n_reads=150, read_len=8,
                                       error_rate=0.0, seed=0)
conflict = E.build_conflict_graph(frags)
print(f"{frags.n_reads} reads x {frags.n_sites} sites -> conflict graph with "
      f"{conflict.n_edges} edges, weights in "
      f"[{conflict.weight.min():.0f}, {conflict.weight.max():.0f}]")

result = E.phase(frags, solver="gw", seed=0, truth_h1=truth)
print(f"\nGW backend: MEC {result.mec}, completeness {result.completeness:.0%}, "
      f"switch {result.switch_error:.0%}, hamming {result.hamming_error:.0%}")
print(f"h1: {result.to_dict()['h1']}")

# the hybrid solver, warm-started from GW, matches it at this scale
light = E.EdvqeConfig(subsystem_size=10, m_samples=32,
                      max_outer_iters=2, outer_patience=1)
result = E.phase(frags, solver="edvqe", solver_config=light, seed=0,
                 truth_h1=truth, warm_start=True)
print(f"\nwarm-started hybrid: MEC {result.mec}, "
      f"completeness {result.completeness:.0%}")

# 2% read errors leave a visible MEC but phasing stays accurate
noisy, truth2 = E.gen_synthetic_diploid(60, 150, 8, error_rate=0.02, seed=0)
result = E.phase(noisy, solver="gw", seed=0, truth_h1=truth2)
print(f"\n2% errors: MEC {result.mec}, switch {result.switch_error:.2%}, "
      f"hamming {result.hamming_error:.2%}")

# at real scale the distributed layout uses 46 subsystems of 11 qubits
print(f"\n506 reads at subsystem size 11 -> "
      f"{E.partition_vertices(506, 11).n_blocks} subsystems")

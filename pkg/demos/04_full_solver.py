"""The complete solve loop: variational initial solution, then alternating
single-flip search (CNS-1) and quantum two-vertex swap perturbation (QP-2).

Run on a 60-vertex cluster graph with 10-vertex communities; the trace shows
how much each stage contributes.
"""
import numpy as np

import edvqe as E

g = E.gen_cluster(60, 10, (5.0, 10.0), (1.0, 3.0), 0.3, seed=3587)
print(f"cluster graph: {g.n_vertices} vertices, {g.n_edges} edges")

config = E.EdvqeConfig(subsystem_size=10, m_samples=64,
                       max_outer_iters=6, outer_patience=2)
result = E.edvqe_solve(g, config, seed=1)

print(f"\ninitial solution: {result.initial.cut:.2f}")
for k, (after_cns1, after_qp2) in enumerate(result.per_outer_iteration):
    print(f"outer {k + 1}: CNS-1 -> {after_cns1:.2f}, QP-2 -> {after_qp2:.2f}")
print(f"best cut: {result.best.cut:.2f} after {result.iterations_run} outer iterations")

c0, c1, c2 = result.stage_cuts()
m = g.n_edges
print(f"\nstage attribution (normalized): initial {c0 / m:.4f}, "
      f"CNS-1 +{(c1 - c0) / m:.4f}, QP-2 +{(c2 - c1) / m:.4f}")

# single-flip deltas around the final solution are all non-positive
deltas = E.all_flip_deltas(g, result.best.bits)
print(f"max single-flip gain at the final solution: {deltas.max():.2e}")

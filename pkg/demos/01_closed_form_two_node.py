"""Two correlated variables, solved by hand and by the learner.

For S = [[1, 0.5], [0.5, 1]] the inverse covariance S^{-1} happens to be a
valid model matrix (nonpositive off-diagonals, strictly dominant diagonal),
so the learner must reach it exactly: one edge of weight 2/3, both vertex
importances 2/3, objective logdet(S) + 2.
"""
import numpy as np

from covgraph import LearnConfig, bound_report, edge_weight_bound, kkt_report, learn_joint

S = np.array([[1.0, 0.5], [0.5, 1.0]])

result = learn_joint(S, LearnConfig(q_min=1e-4))

print("converged:", result.converged, "in", result.epochs_run, "epochs")
print("edges:", result.graph.edges)
print("importances:", result.graph.q)
print("objective:", result.objective, " (closed form:", np.log(0.75) + 2.0, ")")

# First-order optimality, recomputed from scratch:
print()
print(kkt_report(result, S))

# The correlation-based weight bound is attained with equality here:
bound = edge_weight_bound(S, 0, 1)
w = result.graph.edges[0][2]
print()
print(f"weight {w:.8f} vs bound {bound:.8f} (sharp: gap {abs(w - bound):.2e})")
print(bound_report(result, S).records[0])

"""The bundled interior-point SDP solver on small problems."""
import numpy as np

from cvgme.sdp import Block, Constraint, SdpProblem, dual_as_primal, dumps, solve

# min X11 + X22 subject to X12 = 1; optimum 2 at the all-ones matrix
off = np.array([[0.0, 0.5], [0.5, 0.0]])
prob = SdpProblem([Block(2)], [np.eye(2)], [Constraint({0: off}, 1.0)])
sol = solve(prob)
print(sol.status, sol.iterations, "iterations, objective", round(sol.primal_objective, 8))
print(sol.X[0].round(6))

# the dual, rewritten in primal form, has the same optimum
dual, offset = dual_as_primal(prob)
print("dual optimum", round(offset - solve(dual).primal_objective, 8))

# infeasible: a PSD matrix with negative trace
bad = SdpProblem([Block(2)], [np.eye(2)], [Constraint({0: np.eye(2)}, -1.0)])
print(solve(bad).certificate)

print(dumps(prob))

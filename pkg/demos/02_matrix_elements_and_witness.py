"""Fock matrix elements of the Gaussian mixture and a nonlinear GME witness.

The density matrix restricted to at most one photon per mode has closed-form
entries. They are checked against an independent phase-space overlap
computation, then fed to a witness that every biseparable state satisfies.
"""
import numpy as np

from cvgme.gaussian_fock import QUBIT_BASIS, oracle_qubit_subspace_table, qubit_subspace_table
from cvgme.scan import find_threshold, r0_prime_criterion
from cvgme.witnesses import symmetric_witness

r = 0.3
closed = qubit_subspace_table(r)
oracle = oracle_qubit_subspace_table(r)
print(f"largest closed-form vs oracle deviation at r = {r}: {np.max(np.abs(closed - oracle)):.2e}")

labels = ["".join(map(str, t)) for t in QUBIT_BASIS]
for a, b in [(0, 0), (0, 3), (1, 1), (3, 3), (1, 2)]:
    print(f"<{labels[a]}|rho|{labels[b]}> = {closed[a, b]: .6e}")

# witness: lhs > rhs certifies genuine multipartite entanglement
for r in (0.1, 0.2, 0.28, 0.3, 0.5):
    v = symmetric_witness(r)
    print(f"r = {r:.2f}: lhs {v.lhs:.5f}  rhs {v.rhs:.5f}  GME detected: {v.violated}")

res = find_threshold(r0_prime_criterion, 0.05, 0.5, tol=1e-10)
print(f"witness detects GME for 0 < r < {res.root:.6f}")

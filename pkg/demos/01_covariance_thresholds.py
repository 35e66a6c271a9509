"""Covariance-matrix view of the symmetric three-mode mixture.

Mixing a two-mode squeezed vacuum on each pair of modes (the third mode in
vacuum) gives a CM that is biseparable by construction. Below a squeezing r1
it is nevertheless entangled across every one-mode cut.
"""
import numpy as np

from cvgme import ModeBipartition, fs_mixture_cm, nu_tilde_closed_form, ppt_min_symplectic_eigenvalue
from cvgme.scan import find_threshold, r1_criterion

r = 0.6
gamma = fs_mixture_cm(r)
np.set_printoptions(precision=3, suppress=True)
print("CM at r = 0.6 (ordering x1, p1, x2, p2, x3, p3):")
print(gamma.matrix)

# the state is symmetric, so every one-mode cut gives the same PT eigenvalue
for m in range(3):
    bip = ModeBipartition.from_group([m], 3)
    print(f"cut {bip}: smallest PT symplectic eigenvalue {ppt_min_symplectic_eigenvalue(gamma, bip):.6f}")
print(f"closed form: {nu_tilde_closed_form(r):.6f}")

# entanglement across the cuts disappears where the eigenvalue crosses one
res = find_threshold(r1_criterion, 1.0, 1.5, tol=1e-10, name="r1")
print(f"fully inseparable for 0 < r < {res.root:.6f} ({res.iterations} bisection steps)")

for r in (0.5, 1.0, 1.2, 1.3):
    print(f"r = {r:.1f}: nu = {nu_tilde_closed_form(r):.4f}")

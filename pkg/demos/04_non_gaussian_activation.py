"""A non-Gaussian state with the same CM, and two-copy activation.

Mixing TMSV pairs with Fock states on the third mode gives a state with the
same first and second moments as the Gaussian mixture. Its partial transpose
has negative eigenvalues in closed form, and two copies violate a
separability criterion that every biseparable state obeys.
"""
import numpy as np

from cvgme import fs_mixture_cm, fs_state_density, moments_from_density, partial_transpose
from cvgme.fs_analytics import gabriel_two_copy_fs, pt_block_eigenvalues

r = 0.5
lam = np.tanh(r)
rho = fs_state_density(0, lam, 25)
mom = moments_from_density(rho)
print(f"truncation deficit {rho.deficit:.1e}")
print(f"CM difference to the Gaussian mixture: {np.max(np.abs(mom.cm.matrix - fs_mixture_cm(r).matrix)):.1e}")

small = fs_state_density(0, lam, 10)
evals = np.linalg.eigvalsh(partial_transpose(small, [0]).to_dense())
for m in (1, 2, 3):
    target = pt_block_eigenvalues(lam, m)[1]
    print(f"m = {m}: closed form {target:.8f}  nearest numeric {evals[np.argmin(abs(evals - target))]:.8f}")

# two copies, parties grouped across copies
for lam in (0.2, 0.5, 0.8):
    v = gabriel_two_copy_fs(0, lam)
    print(f"lambda = {lam}: lhs {v.lhs:.6f} > rhs {v.rhs}: {v.violated}")

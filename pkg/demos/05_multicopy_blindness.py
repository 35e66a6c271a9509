"""Copies of a Gaussian state cannot reveal GME through the CM test.

The CM of k identical copies inherits a decomposition from the one-copy
decomposition, block by block. The SDP search confirms it.
"""
from cvgme import cm_bisep_feasibility, direct_sum, fs_mixture_cm, fs_mixture_decomposition, multi_copy_gap
from cvgme.entanglement_sdp import verify_feasible
from cvgme.symplectic import tripartite_bipartitions

for r in (0.3, 0.8):
    dec = fs_mixture_decomposition(r)
    for k in (1, 2, 3):
        gamma = direct_sum([fs_mixture_cm(r)] * k)
        parties = [[x + 3 * j for j in range(k)] for x in range(3)]
        res = cm_bisep_feasibility(gamma, tripartite_bipartitions(parties))
        gap, valid = verify_feasible(gamma, res)
        print(f"r = {r}, k = {k}: {type(res).__name__}, weights {res.weights.round(4)}, "
              f"re-check {min(gap, valid):.1e}, decomposition gap {multi_copy_gap(fs_mixture_cm(r), dec, k):.3e}")

"""Two different biseparable Gaussian states that are jointly GME.

The compound of the symmetric mixture (squeezing r1) and a two-term mixture
(squeezing r2) is tested with parties Aa, Bb and Cc. A negative value of the
optimal CM witness shows that no biseparable decomposition exists.
"""
import numpy as np

from cvgme import pair_activation_scan
from cvgme.entanglement_sdp import optimal_cm_witness, pair_bipartitions, pair_compound_cm, verify_witness

wit = optimal_cm_witness(pair_compound_cm(0.5, 0.5), pair_bipartitions())
print(f"(0.5, 0.5): witness value {wit.value:.6f}, independent bound check {verify_witness(wit):.1e}")

r1 = np.linspace(0.1, 1.2, 6)
r2 = np.linspace(0.1, 1.9, 6)
recs = pair_activation_scan(r1, r2, jobs=2)
vals = np.array([rec.values["witness_value"] for rec in recs]).reshape(len(r1), len(r2))
print("rows r1, columns r2; '-' marks detected GME")
for a, row in zip(r1, vals):
    print(f"{a:4.2f} " + " ".join("-" if v < 0 else "." for v in row))

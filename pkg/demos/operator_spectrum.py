"""Fock-space check of the squeezed-ensemble threshold.

The measure-and-prepare operator is block diagonal in the photon-pair number;
every nonzero eigenvalue equals (1 + beta)/(2 + beta). Truncation at 120
photons keeps blocks up to k = 15 exact to rounding.
"""

import numpy as np

from gaussbench.benchmark import squeezed_benchmark_eigen

res = squeezed_benchmark_eigen(2.0, cutoff=120, k_max=15)
print("closed form:     %.12f" % res.closed_form)
for k, vals in enumerate(res.metadata["eigenvalues"][:5]):
    top = vals[0]
    rest = np.max(np.abs(vals[1:])) if len(vals) > 1 else 0.0
    print("block %d: top %.12f, others below %.1e" % (k, top, rest))
print("max deviation over blocks 0..15: %.1e" % res.metadata["max_deviation"])

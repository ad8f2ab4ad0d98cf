"""How much twin-beam squeezing does a teleporter need to beat measure-and-prepare?

Prints the threshold squeezing against the squeezed-ensemble benchmark for a
few prior widths, then the smallest threshold over the width. Run with
``python demos/teleport_thresholds.py``.
"""

import math

from gaussbench.teleport import benchmark_value, db_from_r, fidelity_avg_closed, min_threshold, threshold_r

print("beta    benchmark   r*        dB")
for beta in (0.1, 0.5, 1.0, 3.0, 10.0, 50.0):
    r = threshold_r(beta, math.inf)
    print("%-7g %.6f    %.5f   %.2f" % (beta, benchmark_value(beta, math.inf), r, db_from_r(r)))

best = min_threshold()
print("\nsmallest threshold: r = %.5f (%.2f dB) at beta = %.3f" % (best.r, best.db, best.beta))

# the looser Gaussian benchmark with a flat displacement prior is beaten almost for free
print("beta = 1e3, flat displacement prior: r* = %.2e" % threshold_r(1e3, 0.0))

# without entanglement the teleporter sits below every benchmark
beta = 2.0
print("r = 0 at beta = 2: fidelity %.4f vs benchmark %.4f" % (fidelity_avg_closed(beta, 0.0),
                                                            benchmark_value(beta, math.inf)))

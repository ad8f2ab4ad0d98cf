"""Classical fidelity thresholds for pure single-mode Gaussian states, with numerical cross-checks."""

__version__ = "0.1.0"

from .benchmark import (
    BenchmarkResult,
    Method,
    cft_coherent,
    cft_gaussian,
    cft_squeezed,
    gaussian_block_eigencheck,
    gaussian_cft_quadrature,
    gp_cft_numeric,
    rho_beta,
    squeezed_benchmark_eigen,
    tau_beta,
)
from .fock import GaussianParams, displaced_squeezed_state, gaussian_amplitudes, squeezed_vacuum
from .priors import EnsembleKind, EnsembleSpec, sample_gaussian_params, sample_squeezing
from .specfun import ConvergenceError, gauss_2f1, integrate_1d
from .srm import srm_curve, srm_fidelity, srm_optimize_eta
from .teleport import (
    TwinBeamResource,
    fidelity_avg_closed,
    fidelity_avg_mc,
    fidelity_pointwise,
    region_map,
    threshold_r,
)

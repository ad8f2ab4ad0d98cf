"""Prior densities over Gaussian-state parameters and exact samplers.

Densities are with respect to ``d^2 alpha ds dtheta`` (``d^2 alpha = dRe dIm``),
``s >= 0`` and ``theta in [0, 2 pi)``.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .fock import GaussianParams
from .specfun import bessel_i0


class EnsembleKind(enum.Enum):
    COHERENT = "coherent"
    SQUEEZED = "squeezed"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class EnsembleSpec:
    """Which prior and its inverse widths.

    ``lam`` controls the displacement spread and ``beta`` the squeezing
    spread; ``math.inf`` pins the corresponding parameter (``alpha = 0`` or
    ``s = 0``).
    """
    kind: EnsembleKind
    lam: float = math.inf
    beta: float = math.inf

    def __post_init__(self):
        if self.kind is not EnsembleKind.SQUEEZED and not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.kind is not EnsembleKind.COHERENT and not self.beta > 0:
            raise ValueError("beta must be positive")


def _log_cosh(s):
    s = np.asarray(s, dtype=float)
    return s + np.log1p(np.exp(-2.0 * s)) - math.log(2.0)


def squeezing_marginal(s, beta):
    """``p_beta(s) = beta sinh s / cosh(s)^(beta+1)``."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore"):
        out = beta * np.exp(np.log(np.sinh(np.minimum(s, 700.0))) - (beta + 1) * _log_cosh(s))
    out = np.where(s > 700.0, 0.0, out)
    out = np.where(s <= 0.0, 0.0, out)
    return out[()] if out.ndim == 0 else out


def density_squeezed(s, theta, beta):
    """Squeezed-vacuum prior: uniform phase, ``p_beta(s)`` in the squeezing degree."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    return squeezing_marginal(s, beta) / (2 * math.pi)


def density_coherent(alpha, lam):
    """``(lam / pi) exp(-lam |alpha|^2)``."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    return lam / math.pi * np.exp(-lam * np.abs(alpha) ** 2)


def density_gaussian(alpha, s, theta, lam, beta):
    """Joint prior on ``(alpha, s, theta)``; broadcasts over array arguments."""
    if not (lam > 0 and beta > 0):
        raise ValueError("lam and beta must be positive")
    alpha = np.asarray(alpha, dtype=complex)
    s = np.asarray(s, dtype=float)
    t = np.tanh(s)
    quad_form = -lam * np.abs(alpha) ** 2 + lam * np.real(np.exp(-1j * np.asarray(theta)) * alpha ** 2) * t
    with np.errstate(divide="ignore", over="ignore"):
        log_sinh = np.log(np.sinh(np.minimum(s, 700.0)))
        out = lam * beta / (2 * math.pi ** 2) * np.exp(quad_form + log_sinh - (beta + 2) * _log_cosh(s))
    out = np.where(s > 700.0, 0.0, out)
    return out[()] if out.ndim == 0 else out


def density_gaussian_theta_marginal(abs_alpha, s, lam, beta):
    """Phase-integrated prior ``int dtheta p^G``, in closed form with ``I0``."""
    x = lam * np.asarray(abs_alpha, dtype=float) ** 2
    s = np.asarray(s, dtype=float)
    t = np.tanh(s)
    # e^{-x} I0(x t) = e^{-x(1-t)} * I0e(x t)
    with np.errstate(divide="ignore"):
        out = (lam * beta / math.pi * np.exp(-x * (1 - t) + np.log(np.sinh(s)) - (beta + 2) * _log_cosh(s))
               * bessel_i0(x * t, scaled=True))
    out = np.where(s <= 0.0, 0.0, out)
    return out[()] if out.ndim == 0 else out


def squeezing_cdf(s, beta):
    """``F(s) = 1 - cosh(s)^(-beta)``."""
    return -np.expm1(-beta * _log_cosh(s))


def _squeezing_from_uniform(u, beta):
    # arccosh((1-u)^{-1/beta}), written to stay finite as u -> 1
    y = -np.log1p(-u) / beta  # log cosh s
    return y + np.log1p(np.sqrt(-np.expm1(-2.0 * y)))


def sample_squeezing(beta, rng, size=None):
    """Draw ``(s, theta)`` from the squeezed prior by CDF inversion."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    if math.isinf(beta):
        s = np.zeros(size) if size is not None else 0.0
        theta = rng.uniform(0.0, 2 * math.pi, size)
        return s, theta
    u = rng.uniform(0.0, 1.0, size)
    theta = rng.uniform(0.0, 2 * math.pi, size)
    return _squeezing_from_uniform(u, beta), theta


def sample_gaussian_arrays(lam, beta, rng, size):
    """Vectorized draws ``(alpha, s, theta)`` from the joint Gaussian-state prior.

    ``(s, theta)`` follow the squeezed prior exactly (the alpha-integral of
    the joint density); given them, ``alpha = e^{i theta/2}(u + i v)`` with
    independent normal ``u, v`` of variances ``1/(2 lam (1 -+ tanh s))``.
    """
    if not (lam > 0 and beta > 0):
        raise ValueError("lam and beta must be positive")
    s, theta = sample_squeezing(beta, rng, size)
    s = np.asarray(s, dtype=float)
    if math.isinf(lam):
        return np.zeros_like(s, dtype=complex), s, theta
    t = np.tanh(s)
    # 1 - tanh s = 2 / (1 + e^{2s}), kept accurate for large s
    one_minus_t = 2.0 / (1.0 + np.exp(np.minimum(2.0 * s, 1400.0)))
    u = rng.normal(0.0, 1.0, np.shape(s)) / np.sqrt(2 * lam * one_minus_t)
    v = rng.normal(0.0, 1.0, np.shape(s)) / np.sqrt(2 * lam * (1 + t))
    alpha = np.exp(0.5j * theta) * (u + 1j * v)
    return alpha, s, theta


def sample_gaussian_params(lam, beta, rng):
    """One draw from the joint prior as :class:`GaussianParams`."""
    alpha, s, theta = sample_gaussian_arrays(lam, beta, rng, None)
    return GaussianParams(complex(alpha), float(s), float(theta))


def sample_coherent(lam, rng, size=None):
    """Displacements from ``(lam/pi) exp(-lam |alpha|^2)``."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    sd = 1.0 / math.sqrt(2 * lam)
    return rng.normal(0.0, sd, size) + 1j * rng.normal(0.0, sd, size)

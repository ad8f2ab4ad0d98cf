"""Truncated photon-number representation of single-mode Gaussian states.

Conventions: ``D(alpha) = exp(alpha a^+ - alpha^* a)``,
``S(xi) = exp((xi a^+^2 - xi^* a^2) / 2)`` with ``xi = s e^{i theta}``, and
``|alpha, xi> = D(alpha) S(xi) |0>``.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg, special

from .specfun import log_half_binom

#: Default photon-number cutoff; keeps the squeezed-vacuum tail below 1e-10 for s <= 2.
DEFAULT_CUTOFF = 120

TAIL_WARN = 1e-8


class TruncationWarning(UserWarning):
    """The Fock cutoff leaves more probability in the tail than allowed."""


@dataclass(frozen=True)
class GaussianParams:
    """Displacement ``alpha``, squeezing degree ``s`` and phase ``theta``."""
    alpha: complex = 0j
    s: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("squeezing degree s must be non-negative")
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "theta", float(self.theta) % (2 * math.pi))

    @property
    def xi(self):
        return self.s * np.exp(1j * self.theta)


@dataclass(frozen=True)
class FockVector:
    amplitudes: np.ndarray
    cutoff: int

    @property
    def norm_sq(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def tail_mass(self):
        return max(0.0, 1.0 - self.norm_sq)


@dataclass(frozen=True)
class FockOperator:
    matrix: np.ndarray
    cutoff: int
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (self.cutoff + 1, self.cutoff + 1):
            raise ValueError("matrix shape does not match cutoff %d" % self.cutoff)
        if self.hermitian and np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12:
            raise ValueError("matrix flagged Hermitian but is not")

    def trace(self):
        return float(np.real(np.trace(self.matrix)))


def _log_cosh(s):
    return s + math.log1p(math.exp(-2.0 * s)) - math.log(2.0)


def squeezed_vacuum(s, theta, cutoff, warn=True):
    """Fock amplitudes of ``S(xi)|0>`` up to photon number ``cutoff``.

    Only even photon numbers are populated; the amplitude on ``|2n>`` is
    ``cosh(s)^{-1/2} sqrt(binom(n-1/2, n)) tanh(s)^n e^{i n theta}``.
    """
    if s < 0:
        raise ValueError("s must be non-negative")
    if cutoff < 2 or cutoff % 2:
        raise ValueError("cutoff must be even and >= 2")
    n = np.arange(cutoff // 2 + 1)
    amp = np.zeros(cutoff + 1, dtype=complex)
    if s == 0:
        amp[0] = 1.0
    else:
        t = math.tanh(s)
        logmag = -0.5 * _log_cosh(s) + 0.5 * log_half_binom(n) + n * math.log(t)
        amp[::2] = np.exp(logmag) * np.exp(1j * n * theta)
    vec = FockVector(amp, cutoff)
    if warn and vec.tail_mass > TAIL_WARN:
        warnings.warn("squeezed-vacuum tail mass %.3g at s=%g, cutoff=%d"
                      % (vec.tail_mass, s, cutoff), TruncationWarning, stacklevel=2)
    return vec


def _laguerre_table(nmax, kmax, x):
    """``L_n^{(k)}(x)`` for ``0 <= n <= nmax``, ``0 <= k <= kmax`` by the recurrence in ``n``."""
    k = np.arange(kmax + 1, dtype=float)
    table = np.empty((nmax + 1, kmax + 1))
    table[0] = 1.0
    if nmax >= 1:
        table[1] = 1.0 + k - x
    for n in range(1, nmax):
        table[n + 1] = ((2 * n + 1 + k - x) * table[n] - (n + k) * table[n - 1]) / (n + 1)
    return table


def displacement_matrix(alpha, rows, cols=None):
    """Exact matrix elements ``<m|D(alpha)|n>`` for ``m < rows``, ``n < cols``.

    No truncation of the operator is involved; every entry is the closed
    Laguerre form, so rows of a wide matrix are exact.
    """
    cols = rows if cols is None else cols
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    size = max(rows, cols)
    lag = _laguerre_table(size - 1, size - 1, x)
    lf = special.gammaln(np.arange(size) + 1.0)
    m = np.arange(rows)[:, None]
    n = np.arange(cols)[None, :]
    lo = np.minimum(m, n)
    d = np.abs(m - n)
    if x > 0:
        mag = np.exp(0.5 * (lf[lo] - lf[lo + d]) - 0.5 * x + d * math.log(abs(alpha)))
    else:
        mag = (d == 0).astype(float)
    phase_up = np.exp(1j * math.atan2(alpha.imag, alpha.real) * d)
    # <m|D|n> for m >= n carries alpha^{m-n}; for m < n it carries (-alpha^*)^{n-m}
    phase = np.where(m >= n, phase_up, np.conj(phase_up) * (-1.0) ** d)
    return mag * phase * lag[lo, d]


def displacement_matrix_element(m, n, alpha):
    """``<m|D(alpha)|n>``."""
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be non-negative")
    alpha = complex(alpha)
    if m < n:
        return np.conj(displacement_matrix_element(n, m, -alpha))
    x = abs(alpha) ** 2
    k = m - n
    lag = _laguerre_table(n, k, x)[n, k]
    logpref = 0.5 * (math.lgamma(n + 1) - math.lgamma(m + 1)) - 0.5 * x
    return complex(math.exp(logpref) * alpha ** k * lag)


def displaced_squeezed_state(params, rows, cutoff=DEFAULT_CUTOFF, warn=True):
    """``<n|D(alpha)S(xi)|0>`` for ``n < rows``, via the truncated squeezed vacuum."""
    sv = squeezed_vacuum(params.s, params.theta, cutoff, warn=warn)
    dmat = displacement_matrix(params.alpha, rows, cutoff + 1)
    return dmat @ sv.amplitudes


def displaced_squeezed_amplitude(n, params, cutoff=DEFAULT_CUTOFF, warn=True):
    """Single amplitude ``<n|D(alpha)S(xi)|0>`` with the squeezed vacuum cut at ``cutoff``."""
    if n > cutoff:
        raise ValueError("n exceeds cutoff")
    return complex(displaced_squeezed_state(params, n + 1, cutoff, warn)[n])


def vacuum_overlap_sq(params):
    """Closed form of ``|<0|alpha, xi>|^2``."""
    a, s, th = params.alpha, params.s, params.theta
    t = math.tanh(s)
    expo = -abs(a) ** 2 + (np.exp(-1j * th) * a * a).real * t
    return math.exp(expo - _log_cosh(s))


def gaussian_amplitudes(alpha, s, theta, nmax):
    """``<n|alpha, xi>`` for ``n = 0..nmax`` with no Fock truncation.

    Uses the annihilator of the state,
    ``b = cosh(s) (a - alpha) - e^{i theta} sinh(s) (a^+ - alpha^*)``,
    whose kernel gives the two-term recurrence
    ``sqrt(n+1) c_{n+1} = (alpha - e^{i theta} t alpha^*) c_n + e^{i theta} t sqrt(n) c_{n-1}``.
    Broadcasts over array-valued ``alpha``, ``s``, ``theta``; the Fock index
    is the leading axis of the result.
    """
    alpha = np.asarray(alpha, dtype=complex)
    s = np.asarray(s, dtype=float)
    theta = np.asarray(theta, dtype=float)
    t = np.tanh(s)
    ph = np.exp(1j * theta)
    log_cosh = s + np.log1p(np.exp(-2.0 * s)) - math.log(2.0)
    c0 = np.exp(-0.5 * log_cosh - 0.5 * np.abs(alpha) ** 2
                + 0.5 * ph * t * np.conj(alpha) ** 2)
    shape = np.broadcast(alpha, s, theta).shape
    out = np.empty((nmax + 1,) + shape, dtype=complex)
    out[0] = c0
    lin = alpha - ph * t * np.conj(alpha)
    for n in range(nmax):
        prev = out[n - 1] if n > 0 else 0.0
        out[n + 1] = (lin * out[n] + ph * t * math.sqrt(n) * prev) / math.sqrt(n + 1)
    return out


def hermitian_eigen(op):
    """Eigenvalues (descending) and eigenvectors (columns) of a Hermitian operator."""
    m = op.matrix if isinstance(op, FockOperator) else np.asarray(op)
    if isinstance(op, FockOperator) and not op.hermitian:
        raise ValueError("operator is not flagged Hermitian")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(m), initial=0.0)):
        raise ValueError("matrix is not Hermitian")
    vals, vecs = linalg.eigh(m)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]

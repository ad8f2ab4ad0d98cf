"""Independent reference computations used only by the tests.

Nothing here imports the package under test. Each oracle takes a different
route from the implementation: dense matrix exponentials instead of closed
Fock forms, arbitrary precision instead of double-precision series,
covariance matrices instead of the fidelity formula.
"""

import math

import mpmath as mp
import numpy as np
from scipy import linalg


def ladder(n):
    """Annihilation operator on ``n`` Fock levels."""
    return np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)


def displacement_expm(alpha, n):
    a = ladder(n)
    return linalg.expm(alpha * a.conj().T - np.conj(alpha) * a)


def squeeze_expm(s, theta, n):
    a = ladder(n)
    xi = s * np.exp(1j * theta)
    return linalg.expm(0.5 * (xi * a.conj().T @ a.conj().T - np.conj(xi) * a @ a))


def gaussian_state_expm(alpha, s, theta, n):
    """``D(alpha) S(xi) |0>`` in a large truncated space (interior entries only are trustworthy)."""
    vac = np.zeros(n, dtype=complex)
    vac[0] = 1.0
    return displacement_expm(alpha, n) @ (squeeze_expm(s, theta, n) @ vac)


def hyp2f1_mp(a, b, c, z, dps=40):
    with mp.workdps(dps):
        return float(mp.hyp2f1(a, b, c, z))


def besseli0_mp(z):
    return float(mp.besseli(0, z))


def half_binom_exact(n):
    """``binom(n - 1/2, n)`` in exact rational arithmetic."""
    from fractions import Fraction
    out = Fraction(1)
    for j in range(n):
        out *= Fraction(2 * n - 1 - 2 * j, 2) / (j + 1)
    return float(out)


def squeezed_covariance(s, theta):
    """Quadrature covariance of ``S(xi)|0>`` with vacuum variance 1/2.

    ``S^+ a S = a cosh s + e^{i theta} a^+ sinh s`` stretches the quadrature
    at angle ``theta/2``.
    """
    rot = np.array([[math.cos(theta / 2), -math.sin(theta / 2)],
                    [math.sin(theta / 2), math.cos(theta / 2)]])
    return 0.5 * rot @ np.diag([math.exp(2 * s), math.exp(-2 * s)]) @ rot.T


def vacuum_overlap_moments(alpha, s, theta):
    """``|<0|alpha, xi>|^2`` from the Gaussian overlap of first and second moments."""
    v = squeezed_covariance(s, theta) + 0.5 * np.eye(2)
    d = math.sqrt(2.0) * np.array([alpha.real, alpha.imag]) if isinstance(alpha, complex) \
        else math.sqrt(2.0) * np.array([float(alpha), 0.0])
    return math.exp(-0.5 * d @ np.linalg.solve(v, d)) / math.sqrt(np.linalg.det(v))


def teleport_fidelity_moments(s, theta, r):
    """Unit-gain teleportation output vs input from first and second moments.

    The channel adds ``e^{-2r}`` to each quadrature variance and keeps the
    mean, so the overlap of the pure input with the mixed output is
    ``1 / sqrt(det(V_in + V_out))``. Evaluated at 40 digits because the
    rotated covariance is ill-conditioned for large ``s``.
    """
    with mp.workdps(40):
        c, sn = mp.cos(mp.mpf(theta) / 2), mp.sin(mp.mpf(theta) / 2)
        rot = mp.matrix([[c, -sn], [sn, c]])
        v_in = rot * mp.diag([mp.exp(2 * s) / 2, mp.exp(-2 * s) / 2]) * rot.T
        total = 2 * v_in + mp.exp(-2 * mp.mpf(r)) * mp.eye(2)
        return float(1 / mp.sqrt(mp.det(total)))


def srm_series_direct(beta, eta, k_max):
    """The square-root-measurement series with plain products, no logarithms."""
    def gbin(x, n):
        out = 1.0
        for j in range(n):
            out *= (x - j) / (j + 1)
        return out

    total = 0.0
    for k in range(k_max + 1):
        inner = sum(gbin(k - n - 0.5, k - n)
                    * math.sqrt(gbin(n - 0.5, n) * gbin((eta + 1) / 2 + n, n))
                    for n in range(k + 1))
        total += inner ** 2 / (gbin((beta + 2) / 2 + k, k) * gbin((eta + 2) / 2 + k, k))
    return beta / (beta + 2) * (eta + 1) / (eta + 2) * total

"""Special functions and quadrature shared by the rest of the package.

Everything here is a pure function of its arguments.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special


class ConvergenceError(ArithmeticError):
    """A series or quadrature failed to reach its tolerance."""


def gen_binomial(x, n):
    """Generalized binomial coefficient ``x (x-1) ... (x-n+1) / n!``.

    The product is accumulated factor by factor, so no factorial is ever
    formed and ``n`` can be large.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    out = 1.0
    for j in range(n):
        out *= (x - j) / (j + 1)
    return out


def log_binom_pos(x, n):
    """``log binom(x + n, n)`` for ``x > -1``; vectorized over ``n``."""
    n = np.asarray(n, dtype=float)
    return special.gammaln(x + n + 1) - special.gammaln(n + 1) - special.gammaln(x + 1)


def log_half_binom(n):
    """``log binom(n - 1/2, n)``, the squeezed-vacuum weight (always positive)."""
    n = np.asarray(n, dtype=float)
    return special.gammaln(n + 0.5) - special.gammaln(n + 1) - 0.5 * math.log(math.pi)


# Largest z for which cosh-like growth e^z still fits in a double.
_I0_OVERFLOW = 713.0


def bessel_i0(z, scaled=False):
    """Modified Bessel function ``I0(z)`` for ``z >= 0``.

    With ``scaled=True`` returns ``exp(-z) I0(z)``, which never overflows.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("bessel_i0 is only defined here for z >= 0")
    if scaled:
        out = special.i0e(z)
    else:
        if np.any(z > _I0_OVERFLOW):
            raise OverflowError("I0(z) overflows for z > %g; use scaled=True" % _I0_OVERFLOW)
        out = special.i0(z)
    return out[()] if out.ndim == 0 else out


def _hyp2f1_series(a, b, c, w, rtol, max_terms):
    # Terms are summed in chunks; ratio t_{n+1}/t_n = (a+n)(b+n) w / ((c+n)(n+1)).
    total = 0.0
    last = 1.0
    start = 0
    while start < max_terms:
        chunk = min(4096, max_terms - start)
        n = np.arange(start, start + chunk, dtype=float)
        ratios = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * w
        terms = last * np.concatenate(([1.0], np.cumprod(ratios[:-1])))
        total += math.fsum(terms)
        last = terms[-1] * ratios[-1]
        start += chunk
        tail = abs(last)
        # remaining terms bounded by a geometric series once ratios settle below 1
        r = abs(ratios[-1])
        if r < 1.0 and tail / (1.0 - r) <= rtol * abs(total):
            return total
        if tail == 0.0:
            return total
    raise ConvergenceError(
        "2F1 series did not converge after %d terms (w=%r)" % (max_terms, w))


def _hyp2f1_near_one(a, b, c, w, y, rtol, max_terms):
    """Continuation of 2F1 to ``w`` close to 1 through the ``1 - w`` connection.

    Handles both the generic case and integer ``c - a - b`` (logarithmic case).
    ``y = 1 - w`` is passed separately so callers can supply it without cancellation.
    """
    m_real = c - a - b
    m = round(m_real)
    d = m_real - m
    # node spacing shrinks with |log y| because y^(c-a-b) varies on that scale
    h = 2e-3 / max(1.0, abs(math.log(y)))
    if 1e-12 < abs(d) < 0.5 * h:
        # the two connection terms nearly cancel here; interpolate in c from
        # well-conditioned nodes at least h away from the integer case
        nodes = h * np.array([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0])
        vals = [_hyp2f1_near_one(a, b, c - d + x, w, y, rtol, max_terms) for x in nodes]
        weights = [np.prod([(d - xk) / (xj - xk) for xk in nodes if xk != xj]) for xj in nodes]
        return math.fsum(wj * vj for wj, vj in zip(weights, vals))
    if abs(d) > 1e-12:
        # reciprocal gamma vanishes at the poles instead of producing inf/inf
        g1 = special.gamma(c) * special.gamma(m_real) * special.rgamma(c - a) * special.rgamma(c - b)
        g2 = special.gamma(c) * special.gamma(-m_real) * special.rgamma(a) * special.rgamma(b)
        f1 = _hyp2f1_series(a, b, a + b - c + 1.0, y, rtol, max_terms)
        f2 = _hyp2f1_series(c - a, c - b, m_real + 1.0, y, rtol, max_terms)
        return g1 * f1 + g2 * y ** m_real * f2
    if m < 0:
        # symmetric form: 2F1(a,b;c;w) = y^{c-a-b} 2F1(c-a,c-b;c;w)
        return y ** m_real * _hyp2f1_near_one(c - a, c - b, c, w, y, rtol, max_terms)
    # c = a + b + m with m a non-negative integer
    finite = 0.0
    if m > 0:
        pref = special.gamma(m) * special.gamma(c) * special.rgamma(a + m) * special.rgamma(b + m)
        term = 1.0
        for n in range(m):
            finite += term
            term *= (a + n) * (b + n) / ((n + 1.0) * (1.0 - m + n)) * y if n + 1 < m else 0.0
        finite *= pref
    pref2 = special.gamma(c) * special.rgamma(a) * special.rgamma(b) * (-1.0) ** m * y ** m
    log_y = math.log(y)
    acc = 0.0
    coef = 1.0 / math.factorial(m)
    for n in range(max_terms):
        bracket = (log_y - special.digamma(n + 1.0) - special.digamma(n + m + 1.0)
                   + special.digamma(a + n + m) + special.digamma(b + n + m))
        piece = coef * bracket
        acc += piece
        if n > 2 and abs(piece) <= rtol * abs(acc) and abs(coef) < 1e-300 + rtol * abs(acc):
            break
        coef *= (a + m + n) * (b + m + n) / ((n + 1.0) * (n + m + 1.0)) * y
    else:
        raise ConvergenceError("logarithmic 2F1 continuation did not converge")
    return finite - pref2 * acc


def gauss_2f1(a, b, c, z, rtol=1e-13, max_terms=100_000):
    """Gauss hypergeometric function for real parameters and ``z < 1``.

    Negative arguments go through the Pfaff transformation
    ``2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1))`` so the series
    variable ``w`` lies in ``[0, 1)``. The power series is summed directly for
    ``w <= 0.99``, for terminating cases and when ``c - a - b > 20``;
    otherwise the ``1 - w`` connection formula takes over, including its
    logarithmic form for integer ``c - a - b``.

    Relative accuracy is about 1e-12 in typical use and no worse than about
    1e-10 for ``c - a - b`` within 1e-3 of an integer, where the connection
    formula is replaced by interpolation in ``c``.
    """
    if c <= 0 and float(c).is_integer():
        raise ValueError("c must not be a non-positive integer")
    if z >= 1:
        raise ValueError("only z < 1 is supported")
    if z == 0:
        return 1.0
    if z < 0:
        w = z / (z - 1.0)
        y = 1.0 / (1.0 - z)
        pre = (1.0 - z) ** (-a)
        b = c - b
    else:
        w = z
        y = 1.0 - z
        pre = 1.0
    def nonpos_int(p):
        return p <= 0 and float(p).is_integer()

    # a polynomial (a or b a non-positive integer) needs no continuation, and
    # for large c - a - b the terms fall like n^(a+b-c-1) even at w = 1
    if w <= 0.99 or nonpos_int(a) or nonpos_int(b) or c - a - b > 20.0:
        return pre * _hyp2f1_series(a, b, c, w, rtol, max_terms)
    if nonpos_int(c - a) or nonpos_int(c - b):
        # Euler transformation turns the series into a polynomial
        return pre * y ** (c - a - b) * _hyp2f1_series(c - a, c - b, c, w, rtol, max_terms)
    return pre * _hyp2f1_near_one(a, b, c, w, y, rtol, max_terms)


@dataclass(frozen=True)
class Integral:
    """Result of :func:`integrate_1d`."""
    value: float
    error: float
    converged: bool


def _tanh_map(f, a):
    # s = a + artanh(u), ds = du / (1 - u^2)
    def g(u):
        if u >= 1.0:
            return 0.0
        return f(a + math.atanh(u)) / (1.0 - u * u)
    return g, 0.0, 1.0


def _rational_map(f, a):
    # s = a + (1 - u) / u, ds = du / u^2
    def g(u):
        if u <= 0.0:
            return 0.0
        return f(a + (1.0 - u) / u) / (u * u)
    return g, 0.0, 1.0


def integrate_1d(f, a, b, tol=1e-10, rtol=1e-10, mapping="tanh", limit=200, points=None):
    """Adaptive integral of ``f`` over ``[a, b]``; ``b`` may be ``inf``.

    Semi-infinite ranges are mapped onto ``[0, 1)``. The default
    ``mapping="tanh"`` uses ``s = a + artanh(u)``, which turns integrands that
    decay like powers of ``cosh s`` into algebraic functions of ``u``;
    ``mapping="rational"`` uses ``s = a + (1-u)/u``.

    A NaN anywhere in the integrand raises ``FloatingPointError`` naming the
    abscissa. The returned :class:`Integral` has ``converged=False`` when the
    error estimate exceeds ``max(tol, rtol*|value|)``.
    """
    if b < a:
        res = integrate_1d(f, b, a, tol, rtol, mapping, limit, points)
        return Integral(-res.value, res.error, res.converged)

    def checked(func):
        def g(x):
            y = func(x)
            if y != y:
                raise FloatingPointError("integrand is NaN at x=%r" % x)
            return y
        return g

    if math.isinf(b):
        if mapping == "tanh":
            g, lo, hi = _tanh_map(f, a)
        elif mapping == "rational":
            g, lo, hi = _rational_map(f, a)
        else:
            raise ValueError("unknown mapping %r" % mapping)
        pts = None
    else:
        g, lo, hi = f, a, b
        pts = points
    with np.errstate(all="ignore"):
        value, err, *info = integrate.quad(checked(g), lo, hi, epsabs=tol, epsrel=rtol,
                                           limit=limit, points=pts, full_output=1)
    ok = err <= max(tol, rtol * abs(value)) and len(info) < 2
    return Integral(value, err, bool(ok))

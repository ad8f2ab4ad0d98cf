"""Square-root measurement fidelity for the squeezed ensemble.

Measure with the square-root POVM built for a prior of width ``1/eta``,
re-prepare the estimated squeezed vacuum, and average over inputs drawn with
width ``1/beta``. The fidelity is a positive double series in the total
photon-pair number ``k``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .benchmark import cft_squeezed
from .specfun import log_binom_pos, log_half_binom

DEFAULT_KMAX = 200


@dataclass(frozen=True)
class SrmEvaluation:
    beta: float
    eta: float
    k_max: int
    value: float
    tail_estimate: float
    slow_convergence: bool = False

    @property
    def extrapolated(self):
        return self.value + self.tail_estimate


def srm_terms(beta, eta, k_max):
    """Series terms ``k = 0..k_max`` (including the prefactor)."""
    if not (beta > 0 and eta > 0):
        raise ValueError("beta and eta must be positive")
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    k = np.arange(k_max + 1)
    lf = log_half_binom(k)
    lg = 0.5 * (lf + log_binom_pos((eta + 1) / 2.0, k))
    log_inner = _log_convolve(lf, lg)
    log_den = log_binom_pos((beta + 2) / 2.0, k) + log_binom_pos((eta + 2) / 2.0, k)
    pref = beta / (beta + 2.0) * (eta + 1.0) / (eta + 2.0)
    return pref * np.exp(2.0 * log_inner - log_den)


def _log_convolve(lf, lg, chunk=512):
    """``log sum_{n<=k} exp(lf[k-n] + lg[n])`` for every ``k``.

    Every summand is positive, so a plain log-sum-exp is exact up to rounding
    and never overflows, whatever the size of ``eta``.
    """
    size = len(lf)
    if lg.max() - lg.min() < 600.0 and lf.max() - lf.min() < 600.0:
        shift = lg.max() + lf.max()
        conv = np.convolve(np.exp(lf - lf.max()), np.exp(lg - lg.max()))[:size]
        if np.all(conv > 1e-280):
            return np.log(conv) + shift
    out = np.empty(size)
    n = np.arange(size)
    for start in range(0, size, chunk):
        kk = np.arange(start, min(start + chunk, size))[:, None]
        idx = kk - n[None, :]
        vals = np.where(idx >= 0, lf[np.clip(idx, 0, None)] + lg[None, :], -np.inf)
        out[start:start + len(kk)] = special.logsumexp(vals, axis=1)
    return out


def _tail(terms, beta):
    """Sum of the terms beyond the last one.

    The terms decay as ``k^-p`` with ``p = beta/2 + 1`` for every ``eta``;
    the amplitude and its ``1/k``, ``1/k^2`` corrections are fitted to the last
    three terms and the resulting power sums are Hurwitz zeta values.
    """
    size = len(terms)
    if size < 4 or terms[-1] <= 0:
        return 0.0
    p = 0.5 * beta + 1.0
    big_k = size - 1
    # past a few thousand terms the corrections are negligible and the fit ill-conditioned
    order = 2 if big_k < 5000 else 0
    k = np.arange(big_k - order, big_k + 1, dtype=float)
    x = big_k / k
    coef = np.linalg.solve(np.vander(x, order + 1, increasing=True), terms[-order - 1:] * k ** p)
    total = sum(c * big_k ** i * special.zeta(p + i, big_k + 1) for i, c in enumerate(coef))
    return max(float(total), 0.0)


def srm_fidelity(beta, eta, k_max=DEFAULT_KMAX):
    """Partial sum of the square-root-measurement fidelity up to ``k_max``."""
    terms = srm_terms(beta, eta, k_max)
    value = math.fsum(terms)
    ratio = terms[-1] / terms[-2] if k_max >= 1 and terms[-2] > 0 else 0.0
    return SrmEvaluation(beta, eta, k_max, value, _tail(terms, beta), bool(ratio > 0.999))


def srm_fidelity_trace(beta, eta, k_max):
    """Same quantity from Fock-space blocks: ``Tr[rho_beta (I x tau^-1/2) rho_eta (I x tau^-1/2)]``."""
    from .benchmark import measure_prepare_blocks, rho_beta, tau_beta

    rho_b = rho_beta(beta, k_max)
    a_eta, _ = measure_prepare_blocks(rho_beta(eta, k_max), tau_beta(eta, 2 * k_max))
    return math.fsum(float(np.sum(rb * ae.T)) for rb, ae in zip(rho_b.blocks, a_eta))


@dataclass(frozen=True)
class SrmOptimum:
    """Best measurement width ``eta_star`` for a given ``beta``.

    ``value`` is the tail-corrected fidelity at ``eta_star`` and
    ``partial_sum`` the raw series up to ``k_max``.
    """
    beta: float
    eta_star: float
    value: float
    partial_sum: float
    tail_estimate: float
    cft: float
    fallback: bool
    bracket_extended: bool
    k_max: int

    @property
    def gap(self):
        return self.cft - self.value

    @property
    def relative_gap(self):
        return self.gap / self.cft


def _objective(beta, k_max, corrected):
    def f(log_eta):
        ev = srm_fidelity(beta, math.exp(log_eta), k_max)
        return ev.extrapolated if corrected else ev.value
    return f


def srm_optimize_eta(beta, k_max=DEFAULT_KMAX, eta_hi=None, scan_points=41,
                     tail_corrected=True, xtol=1e-9, max_extend=6):
    """Maximize the square-root-measurement fidelity over ``eta``.

    A log-spaced coarse scan on ``(1e-3 eta_hi, eta_hi]`` locates the best
    cell and checks unimodality; a bounded scalar search in ``log eta``
    refines it. If the best scan point sits on the upper edge the interval is
    widened tenfold (up to ``max_extend`` times).

    With ``tail_corrected=True`` (default) the objective is the partial sum
    plus its power-law tail estimate, which matters for small ``beta`` where
    the terms decay slowly.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    eta_hi = 10.0 * beta + 20.0 if eta_hi is None else float(eta_hi)
    f = _objective(beta, k_max, tail_corrected)
    extended = False
    for _ in range(max_extend + 1):
        grid = np.linspace(math.log(eta_hi) - math.log(1e3), math.log(eta_hi), scan_points)
        vals = np.array([f(x) for x in grid])
        i = int(np.argmax(vals))
        if i < len(grid) - 1:
            break
        eta_hi *= 10.0
        extended = True
    steps = np.sign(np.diff(vals))
    steps = steps[steps != 0]
    fallback = bool(np.count_nonzero(np.diff(steps)) > 1)
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded",
                                   options={"xatol": xtol})
    x_best = float(res.x) if -res.fun >= vals[i] else float(grid[i])
    eta_star = math.exp(x_best)
    ev = srm_fidelity(beta, eta_star, k_max)
    value = ev.extrapolated if tail_corrected else ev.value
    return SrmOptimum(float(beta), eta_star, value, ev.value, ev.tail_estimate,
                      cft_squeezed(beta), fallback, extended, k_max)


def srm_curve(beta_grid, k_max=DEFAULT_KMAX, tail_corrected=True):
    """Rows ``beta, eta_star, srm_value, cft, gap`` (plus diagnostics) over ``beta_grid``."""
    rows = []
    for b in beta_grid:
        if not b > 0:
            raise ValueError("grid values must be positive")
        opt = srm_optimize_eta(float(b), k_max, tail_corrected=tail_corrected)
        rows.append({"beta": float(b), "eta_star": opt.eta_star, "srm_value": opt.value,
                     "cft": opt.cft, "gap": opt.gap, "partial_sum": opt.partial_sum,
                     "tail_estimate": opt.tail_estimate, "fallback": opt.fallback})
    return rows

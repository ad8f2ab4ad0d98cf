"""Unit-gain continuous-variable teleportation of Gaussian inputs.

The shared resource is a two-mode squeezed vacuum with squeezing ``r``. For
a pure Gaussian input the output fidelity depends only on the input
squeezing degree ``s``, so ensemble averages reduce to one-dimensional
integrals against the squeezing prior.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .benchmark import cft_gaussian
from .priors import sample_squeezing, squeezing_marginal
from .specfun import gauss_2f1, integrate_1d

#: Largest resource squeezing searched before declaring "never beats".
R_MAX = 10.0

#: Samples per independent random stream in the Monte Carlo average.
MC_CHUNK = 1 << 15


def db_from_r(r):
    """Variance suppression in decibels, ``10 log10(e^{2r})``."""
    return 20.0 * r / math.log(10.0)


def r_from_db(db):
    return db * math.log(10.0) / 20.0


@dataclass(frozen=True)
class TwinBeamResource:
    """Two-mode squeezed vacuum shared by sender and receiver."""
    r: float

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError("r must be non-negative")

    @property
    def db(self):
        return db_from_r(self.r)

    @classmethod
    def from_db(cls, db):
        return cls(r_from_db(db))


def fidelity_pointwise(s, r):
    """Teleportation fidelity for an input with squeezing degree ``s``.

    Equal to ``{2 e^{-2r} [cosh 2r + cosh 2s]}^{-1/2}``, evaluated as
    ``(1 + e^{-4r} + e^{2(s-r)} + e^{-2(s+r)})^{-1/2}`` so that large ``s`` or
    ``r`` never overflow. Independent of displacement and squeezing phase.
    """
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(s < 0) or np.any(r < 0):
        raise ValueError("s and r must be non-negative")
    with np.errstate(over="ignore"):
        d = 1.0 + np.exp(-4.0 * r) + np.exp(2.0 * (s - r)) + np.exp(-2.0 * (s + r))
    out = 1.0 / np.sqrt(d)
    return out[()] if out.ndim == 0 else out


def fidelity_avg_closed(beta, r):
    """Average fidelity over the squeezing prior, through a Gauss hypergeometric function.

    ``beta = inf`` pins the input to the vacuum and gives ``1/(1 + e^{-2r})``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    if not r >= 0:
        raise ValueError("r must be non-negative")
    if math.isinf(beta):
        return 1.0 / (1.0 + math.exp(-2.0 * r))
    z = -math.sinh(r) ** 2
    f = gauss_2f1(0.5, (beta + 1) / 2.0, (beta + 3) / 2.0, z)
    return beta / (2.0 * beta + 2.0) * math.exp(r) * f


def fidelity_avg_quadrature(beta, r, tol=1e-12):
    """Same average by adaptive quadrature of ``p_beta(s) F(s; r)`` over ``s >= 0``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    res = integrate_1d(lambda s: float(squeezing_marginal(s, beta) * fidelity_pointwise(s, r)),
                       0.0, math.inf, tol=tol, rtol=tol)
    return res.value


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    n_samples: int


def _mc_chunk(beta, r, n, seed_seq):
    rng = np.random.default_rng(seed_seq)
    s, _ = sample_squeezing(beta, rng, n)
    f = fidelity_pointwise(s, r)
    return float(np.sum(f)), float(np.sum(f * f))


def fidelity_avg_mc(beta, r, n_samples=100_000, seed=0, workers=1):
    """Monte Carlo average fidelity with its standard error.

    Samples are drawn in fixed chunks of :data:`MC_CHUNK`, each from its own
    stream spawned from ``seed``; the result does not depend on ``workers``.
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    if not beta > 0:
        raise ValueError("beta must be positive")
    sizes = [MC_CHUNK] * (n_samples // MC_CHUNK)
    if n_samples % MC_CHUNK:
        sizes.append(n_samples % MC_CHUNK)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, streams))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _mc_chunk(beta, r, j[0], j[1]), jobs))
    else:
        parts = [_mc_chunk(beta, r, n, ss) for n, ss in jobs]
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
    return MonteCarloEstimate(mean, math.sqrt(var / n_samples), n_samples)


def benchmark_value(beta, lam):
    """Classical threshold the teleporter has to beat; ``lam = inf`` is the squeezed ensemble."""
    if not lam >= 0:
        raise ValueError("lam must be non-negative")
    return cft_gaussian(lam, beta)


def threshold_r(beta, lam, tol=1e-10, r_max=R_MAX):
    """Smallest resource squeezing ``r`` whose average fidelity beats the threshold.

    Returns ``0.0`` if even ``r = 0`` beats it and ``None`` if ``r_max`` does
    not. The average fidelity increases strictly with ``r``, so the root is
    unique.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    target = benchmark_value(beta, lam)
    gap = lambda r: fidelity_avg_closed(beta, r) - target
    g0 = gap(0.0)
    if g0 > 0:
        return 0.0
    g1 = gap(r_max)
    if g1 <= 0:
        return None
    return float(optimize.brentq(gap, 0.0, r_max, xtol=tol, rtol=4 * np.finfo(float).eps))


@dataclass(frozen=True)
class ThresholdMinimum:
    beta: float
    r: float

    @property
    def db(self):
        return db_from_r(self.r)


def min_threshold(lam=math.inf, beta_range=(0.1, 50.0), scan_points=60, tol=1e-10):
    """Smallest threshold squeezing over ``beta`` in ``beta_range`` (scan, then bounded refinement)."""
    lo, hi = beta_range
    if not 0 < lo < hi:
        raise ValueError("need 0 < beta_lo < beta_hi")
    logs = np.linspace(math.log(lo), math.log(hi), scan_points)

    def f(x):
        r = threshold_r(math.exp(x), lam, tol)
        return R_MAX * 2 if r is None else r

    vals = [f(x) for x in logs]
    i = int(np.argmin(vals))
    a, b = logs[max(i - 1, 0)], logs[min(i + 1, len(logs) - 1)]
    res = optimize.minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-8})
    if res.fun <= vals[i]:
        return ThresholdMinimum(math.exp(float(res.x)), float(res.fun))
    return ThresholdMinimum(math.exp(float(logs[i])), float(vals[i]))


def region_map(beta_grid, r_grid, lambda_cases=(0.0, math.inf)):
    """Rows ``beta, r, fidelity`` plus one ``beats_lambda_<lam>`` flag per benchmark case."""
    rows = []
    for beta in beta_grid:
        if not beta > 0:
            raise ValueError("beta grid values must be positive")
        targets = [(lam, benchmark_value(beta, lam)) for lam in lambda_cases]
        for r in r_grid:
            if not r >= 0:
                raise ValueError("r grid values must be non-negative")
            fid = fidelity_avg_closed(beta, r)
            row = {"beta": float(beta), "r": float(r), "fidelity": fid}
            for lam, target in targets:
                row["beats_lambda_%s" % _lam_label(lam)] = bool(fid > target)
            rows.append(row)
    return rows


def _lam_label(lam):
    return "inf" if math.isinf(lam) else "%g" % lam

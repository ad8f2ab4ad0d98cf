"""Acceptance checks: every closed form against an independent numerical route.

Each check returns a :class:`CheckResult`; a check passes only if all of its
comparisons meet their tolerance *and* it finishes within its time budget.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats

from . import benchmark, priors, srm, teleport
from .specfun import integrate_1d


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    seconds: float
    budget: float
    details: list = field(default_factory=list)

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return "[%s] %d. %s (%.2f s of %.0f s)" % (tag, self.number, self.name, self.seconds, self.budget)


class _Recorder:
    def __init__(self):
        self.ok = True
        self.details = []

    def check(self, label, value, bound, ok=None):
        ok = value <= bound if ok is None else ok
        self.ok &= bool(ok)
        self.details.append("%s %s: %.3e (bound %.1e)" % ("ok " if ok else "BAD", label, value, bound))

    def flag(self, label, ok, note=""):
        self.ok &= bool(ok)
        self.details.append("%s %s%s" % ("ok " if ok else "BAD", label, (": " + note) if note else ""))


def _run(number, name, budget, body, **kw):
    rec = _Recorder()
    t0 = time.perf_counter()
    body(rec, **kw)
    dt = time.perf_counter() - t0
    if dt > budget:
        rec.flag("runtime", False, "%.1f s exceeds %.0f s" % (dt, budget))
    return CheckResult(number, name, rec.ok, dt, budget, rec.details)


# -------------------------------------------------------------------- checks

def _squeezed_operator(rec):
    for beta in (0.5, 1.0, 2.0, 5.0):
        res = benchmark.squeezed_benchmark_eigen(beta, cutoff=120, k_max=15, tol=1e-8)
        rec.check("beta=%g max |eig - (1+b)/(2+b)|" % beta, res.metadata["max_deviation"], 1e-8)


def _gaussian_quadrature(rec):
    for lam in (0.2, 1.0, 5.0):
        for beta in (0.2, 1.0, 5.0):
            res = benchmark.gaussian_cft_quadrature(lam, beta)
            md = res.metadata
            rec.check("(%g,%g) Bessel route" % (lam, beta), abs(md["bessel_route"] - res.closed_form), 1e-6)
            rec.check("(%g,%g) reduced route" % (lam, beta), abs(md["reduced_route"] - res.closed_form), 1e-6)


def _limits(rec):
    for beta in (0.5, 2.0, 5.0):
        res = benchmark.gaussian_cft_quadrature(1e3, beta)
        rec.check("lam=1e3 beta=%g vs squeezed threshold" % beta,
                  abs(res.numeric - benchmark.cft_squeezed(beta)), 1e-3)
    rec.check("lam=beta=1e-3 vs 1/4", abs(benchmark.cft_gaussian(1e-3, 1e-3) - 0.25), 2e-2)


def _block_eigen(rec):
    for lam, beta in ((1.0, 2.0), (0.5, 5.0)):
        rep = benchmark.gaussian_block_eigencheck(lam, beta, k_max=4, quad_tol=1e-4)
        rec.check("(%g,%g) max eig - a00" % (lam, beta), rep.max_eigenvalue - rep.a00, 1e-4)
        rec.check("(%g,%g) |a00 - closed form|" % (lam, beta), abs(rep.a00 - rep.closed_form), 1e-4)


def _srm_suite(rec):
    for beta in (0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0):
        opt = srm.srm_optimize_eta(beta)
        excess = max(opt.value, opt.partial_sum) - opt.cft
        rec.check("beta=%g sup excess over threshold" % beta, excess, 1e-9)
        if beta == 30.0:
            rec.check("beta=30 relative gap", opt.relative_gap, 1e-2)
    for beta in (0.5, 2.0, 5.0):
        for eta in (1.0, 3.0, 8.0):
            series = srm.srm_fidelity(beta, eta, 25).value
            trace = srm.srm_fidelity_trace(beta, eta, 25)
            rec.check("(%g,%g) series vs trace" % (beta, eta), abs(series - trace), 1e-8)


def _teleport_suite(rec, mc_samples=100_000, seed=20240601):
    grid_b = (0.3, 1.0, 2.0, 5.0, 20.0)
    grid_r = (0.0, 0.3, 1.0, 2.0, 4.0)
    worst_quad, worst_z = 0.0, 0.0
    for i, beta in enumerate(grid_b):
        for j, r in enumerate(grid_r):
            closed = teleport.fidelity_avg_closed(beta, r)
            worst_quad = max(worst_quad, abs(closed - teleport.fidelity_avg_quadrature(beta, r)))
            mc = teleport.fidelity_avg_mc(beta, r, mc_samples, seed=[seed, i, j])
            worst_z = max(worst_z, abs(mc.mean - closed) / mc.std_error)
    rec.check("closed vs quadrature (5x5)", worst_quad, 1e-8)
    rec.check("closed vs Monte Carlo, worst |z| (5x5)", worst_z, 4.0)
    thr = teleport.threshold_r(1e3, 0.0)
    rec.check("threshold at beta=1e3, lam->0", math.inf if thr is None else thr, 1e-2)
    mn = teleport.min_threshold(math.inf, (0.1, 50.0))
    rec.check("min threshold r over beta (lam=inf), at beta=%.3g" % mn.beta, mn.r, 1.151, ok=mn.r >= 1.151)


def _prior_suite(rec, n=100_000, seed=7):
    # normalization
    for beta in (0.5, 1.0, 5.0, 20.0):
        v = integrate_1d(lambda s: float(priors.squeezing_marginal(s, beta)), 0, math.inf).value
        rec.check("squeezing prior beta=%g norm" % beta, abs(v - 1), 1e-6)
    for lam in (0.2, 1.0, 5.0):
        v = integrate_1d(lambda p: 2 * math.pi * p * float(priors.density_coherent(p, lam)), 0, math.inf).value
        rec.check("coherent prior lam=%g norm" % lam, abs(v - 1), 1e-6)
    for lam, beta in ((0.5, 2.0), (2.0, 0.7)):
        tot = integrate_1d(lambda s: 2 * math.pi * _alpha_integral(lam, beta, s, 0.4), 0, math.inf).value
        rec.check("joint prior (%g,%g) norm" % (lam, beta), abs(tot - 1), 1e-6)

    # marginal identities
    worst_a, worst_t = 0.0, 0.0
    for s in (0.1, 0.6, 1.5, 3.0):
        for theta in (0.0, 1.0, 4.0):
            for lam, beta in ((0.5, 2.0), (2.0, 0.7)):
                inner = _alpha_integral(lam, beta, s, theta)
                worst_a = max(worst_a, abs(inner - float(priors.density_squeezed(s, theta, beta))))
        for a in (0.2 + 0.1j, 1.0 - 0.7j, 2.5j):
            for lam, beta in ((0.5, 2.0), (2.0, 0.7)):
                num, _ = integrate.quad(lambda th: float(priors.density_gaussian(a, s, th, lam, beta)),
                                        0, 2 * math.pi, epsabs=1e-14, epsrel=1e-12, limit=200)
                ref = float(priors.density_gaussian_theta_marginal(abs(a), s, lam, beta))
                worst_t = max(worst_t, abs(num - ref))
    rec.check("int d2alpha p^G = p^S (pointwise)", worst_a, 1e-8)
    rec.check("theta-marginal I0 form (pointwise)", worst_t, 1e-8)

    # samplers
    rng = np.random.default_rng(seed)
    beta, lam = 1.5, 0.8
    alpha, s, theta = priors.sample_gaussian_arrays(lam, beta, rng, n)
    p = stats.kstest(s, lambda x: priors.squeezing_cdf(x, beta)).pvalue
    rec.check("KS squeezing degree (p-value)", p, 0.01, ok=p > 0.01)
    p = stats.kstest(theta, stats.uniform(0, 2 * math.pi).cdf).pvalue
    rec.check("KS squeezing phase (p-value)", p, 0.01, ok=p > 0.01)
    rot = alpha * np.exp(-0.5j * theta)
    t = np.tanh(s)
    p = stats.kstest(rot.real * np.sqrt(2 * lam * (1 - t)), "norm").pvalue
    rec.check("KS displacement, long axis (p-value)", p, 0.01, ok=p > 0.01)
    p = stats.kstest(rot.imag * np.sqrt(2 * lam * (1 + t)), "norm").pvalue
    rec.check("KS displacement, short axis (p-value)", p, 0.01, ok=p > 0.01)
    edges = priors._squeezing_from_uniform(np.linspace(0, 1, 21)[1:-1], beta)
    counts = np.bincount(np.searchsorted(edges, s), minlength=20)
    p = stats.chisquare(counts).pvalue
    rec.check("chi2 squeezing degree, 20 equiprobable bins (p-value)", p, 0.01, ok=p > 0.01)
    coh = priors.sample_coherent(lam, rng, n)
    p = stats.kstest(lam * np.abs(coh) ** 2, "expon").pvalue
    rec.check("KS coherent |alpha|^2 (p-value)", p, 0.01, ok=p > 0.01)


def _alpha_integral(lam, beta, s, theta, half_width=12.0, points=241):
    """``int d^2 alpha p^G(alpha, s, theta)`` on axis-scaled coordinates.

    The trapezoid rule converges geometrically for smooth integrands that
    decay this fast, so a fixed vectorized grid beats adaptive cubature.
    """
    t = math.tanh(s)
    one_minus_t = 2.0 / (1.0 + math.exp(min(2 * s, 1400.0)))
    wu = 1.0 / math.sqrt(lam * one_minus_t)
    wv = 1.0 / math.sqrt(lam * (1 + t))
    ph = complex(math.cos(theta / 2), math.sin(theta / 2))
    x = np.linspace(-half_width, half_width, points)
    a, b = np.meshgrid(x, x, indexing="ij")
    vals = priors.density_gaussian(ph * (a * wu + 1j * b * wv), s, theta, lam, beta)
    return float(integrate.trapezoid(integrate.trapezoid(vals, x, axis=1), x)) * wu * wv


def _gp_engine(rec):
    for lam in (0.5, 1.0, 2.0):
        v = benchmark.gp_cft_numeric(benchmark.coherent_kernel(lam))
        rec.check("coherent lam=%g" % lam, abs(v - benchmark.cft_coherent(lam)), 1e-6)
    for beta in (1.0, 2.0, 5.0):
        v = benchmark.gp_cft_numeric(benchmark.squeezed_kernel(beta))
        rec.check("squeezed beta=%g" % beta, abs(v - benchmark.cft_squeezed(beta)), 1e-6)


CHECKS = (
    (1, "squeezed threshold, Fock operator eigenvalues", 10.0, _squeezed_operator),
    (2, "Gaussian threshold, two quadrature routes", 30.0, _gaussian_quadrature),
    (3, "limit recovery", 60.0, _limits),
    (4, "Gaussian block eigenvalues", 300.0, _block_eigen),
    (5, "square-root measurement suite", 120.0, _srm_suite),
    (6, "teleportation suite", 120.0, _teleport_suite),
    (7, "prior suite", 60.0, _prior_suite),
    (8, "group-integral engine", 30.0, _gp_engine),
)


def run_check(number, **kw):
    for num, name, budget, body in CHECKS:
        if num == number:
            return _run(num, name, budget, body, **kw)
    raise KeyError(number)


def run_all(quick=False, on_result=None):
    """Run every acceptance check in order.

    ``quick`` adds nothing slow: it is the stated acceptance suite. The full
    run additionally evaluates the displaced-squeezed group integral.
    """
    results = []
    for num, name, budget, body in CHECKS:
        res = _run(num, name, budget, body)
        results.append(res)
        if on_result:
            on_result(res)
    if not quick:
        res = _run(9, "group-integral engine, displaced squeezed states", 60.0, _gp_jacobi)
        results.append(res)
        if on_result:
            on_result(res)
    return results


def _gp_jacobi(rec):
    for lam, beta in ((0.5, 2.0),):
        v = benchmark.gp_cft_numeric(benchmark.jacobi_kernel(lam, beta), tol=1e-8)
        rec.check("(%g,%g)" % (lam, beta), abs(v - benchmark.cft_gaussian(lam, beta)), 1e-6)

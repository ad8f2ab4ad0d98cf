"""Command-line interface: ``gaussbench <command> [options]``.

Every command writes a table (CSV or JSON) preceded by a metadata block.
Options may also come from a JSON config file (``--config``); options given
on the command line win. Exit status: 0 success, 2 bad configuration,
3 numerical non-convergence, 4 failed verification.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from . import __version__, benchmark, priors, srm, teleport, verify
from .specfun import ConvergenceError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


def load_schema():
    return json.loads(resources.files("gaussbench").joinpath("schema.json").read_text())


# ------------------------------------------------------------ value parsing

def parse_real(text, name="value"):
    """Float or the token ``inf``."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    try:
        return float(str(text).strip())
    except ValueError:
        raise ConfigError("%s: cannot parse %r as a number" % (name, text)) from None


def parse_grid(text, name="grid"):
    """Grid from ``lo:hi:N`` (linear), ``lo:hi:logN`` (log-spaced), ``a,b,c`` or a list."""
    if isinstance(text, (list, tuple)):
        return [parse_real(x, name) for x in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("%s: expected lo:hi:N or lo:hi:logN, got %r" % (name, text))
        lo, hi = parse_real(parts[0], name), parse_real(parts[1], name)
        spec = parts[2].strip()
        log = spec.startswith("log")
        try:
            n = int(spec[3:] if log else spec)
        except ValueError:
            raise ConfigError("%s: bad point count in %r" % (name, text)) from None
        if n < 1:
            raise ConfigError("%s: need at least one point" % name)
        if log:
            if not 0 < lo <= hi:
                raise ConfigError("%s: log grid needs 0 < lo <= hi" % name)
            return [float(x) for x in np.geomspace(lo, hi, n)]
        return [float(x) for x in np.linspace(lo, hi, n)]
    return [parse_real(x, name) for x in text.split(",") if x.strip()]


def _positive(name, value, allow_inf=True, allow_zero=False):
    ok = value >= 0 if allow_zero else value > 0
    if not ok or (math.isinf(value) and not allow_inf) or math.isnan(value):
        raise ConfigError("%s must be %s%s, got %r" % (
            name, "non-negative" if allow_zero else "positive", "" if allow_inf else " and finite", value))
    return value


# ---------------------------------------------------------------- commands
# Each command takes the merged option dict and returns (rows, extra_metadata).

def cmd_cft(opt):
    lam = _positive("lambda", parse_real(opt["lambda"], "lambda"), allow_zero=True)
    beta = _positive("beta", parse_real(opt["beta"], "beta"))
    tol = _positive("tol", parse_real(opt["tol"], "tol"), allow_inf=False)
    closed = benchmark.cft_gaussian(lam, beta)
    converged = True
    if math.isinf(lam) and math.isinf(beta):
        numeric, method = 1.0, "closed_form"
    elif math.isinf(lam):
        res = benchmark.squeezed_benchmark_eigen(beta, cutoff=int(opt["cutoff"]), k_max=int(opt["k_max"]))
        numeric, method = res.numeric, res.method.value
    elif math.isinf(beta):
        if lam == 0:
            numeric, method = float("nan"), "closed_form"
        else:
            numeric, method = benchmark.gp_cft_numeric(benchmark.coherent_kernel(lam), tol), "group_integral"
    elif lam == 0:
        numeric, method = float("nan"), "closed_form"
    else:
        res = benchmark.gaussian_cft_quadrature(lam, beta, tol)
        numeric, method = res.numeric, res.method.value
        converged = res.metadata["converged"]
        if not converged:
            raise ConvergenceError("quadrature did not reach tol=%g at lambda=%g, beta=%g" % (tol, lam, beta))
    disc = abs(closed - numeric) if numeric == numeric else float("nan")
    return [{"lambda": lam, "beta": beta, "closed_form": closed, "numeric": numeric,
             "abs_discrepancy": disc, "method": method, "converged": converged}], {}


def cmd_eigencheck(opt):
    lam = _positive("lambda", parse_real(opt["lambda"], "lambda"))
    beta = _positive("beta", parse_real(opt["beta"], "beta"), allow_inf=False)
    rows = []
    if math.isinf(lam):
        res = benchmark.squeezed_benchmark_eigen(beta, cutoff=int(opt["cutoff"]), k_max=int(opt["k_max"]))
        a00 = res.closed_form
        for k, vals in enumerate(res.metadata["eigenvalues"]):
            for i, v in enumerate(vals):
                rows.append({"lambda": lam, "beta": beta, "block": k, "rank": i, "eigenvalue": float(v),
                             "a00": a00, "closed_form": res.closed_form,
                             "below_a00": bool(v <= a00 + res.metadata["tol"])})
        return rows, {"max_deviation": res.metadata["max_deviation"]}
    k_max = int(opt["k_max"])
    if not 0 <= k_max <= 6:
        raise ConfigError("k_max must be in [0, 6] for finite lambda")
    qt = _positive("quad_tol", parse_real(opt["quad_tol"]), allow_inf=False)
    rep = benchmark.gaussian_block_eigencheck(lam, beta, k_max=k_max, quad_tol=qt,
                                              gh_points=int(opt["gh_points"]))
    for k, vals in enumerate(rep.eigenvalues):
        for i, v in enumerate(vals):
            rows.append({"lambda": lam, "beta": beta, "block": k, "rank": i, "eigenvalue": float(v),
                         "a00": rep.a00, "closed_form": rep.closed_form,
                         "below_a00": bool(v <= rep.a00 + qt)})
    return rows, {"quad_error": rep.quad_error}


def _srm_row(args):
    beta, k_max, corrected = args
    return srm.srm_curve([beta], k_max, tail_corrected=corrected)[0]


def cmd_srm_scan(opt):
    grid = [_positive("beta", b, allow_inf=False) for b in parse_grid(opt["beta_grid"], "beta_grid")]
    k_max = int(opt["k_max"])
    if k_max < 3:
        raise ConfigError("k_max must be at least 3")
    jobs = [(b, k_max, not opt["no_tail_correction"]) for b in grid]
    workers = int(opt["workers"])
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_srm_row, jobs))
    else:
        rows = [_srm_row(j) for j in jobs]
    return rows, {}


def cmd_teleport_map(opt):
    betas = [_positive("beta", b, allow_inf=False) for b in parse_grid(opt["beta_grid"], "beta_grid")]
    rs = [_positive("r", r, allow_inf=False, allow_zero=True) for r in parse_grid(opt["r_grid"], "r_grid")]
    return teleport.region_map(betas, rs, (0.0, math.inf)), {}


def cmd_threshold(opt):
    lam = _positive("lambda", parse_real(opt["lambda"], "lambda"), allow_zero=True)
    tol = _positive("tol", parse_real(opt["tol"], "tol"), allow_inf=False)
    r_max = _positive("r_max", parse_real(opt["r_max"], "r_max"), allow_inf=False)
    betas = [_positive("beta", b, allow_inf=False) for b in parse_grid(opt["beta_grid"], "beta_grid")]
    extra = {}
    if opt["minimize"]:
        if len(betas) < 2:
            raise ConfigError("--minimize needs a beta grid with at least two points (its range is used)")
        extra["minimized_over"] = [min(betas), max(betas)]
        mn = teleport.min_threshold(lam, (min(betas), max(betas)), tol=tol)
        betas = [mn.beta]
    rows = []
    for b in betas:
        r = teleport.threshold_r(b, lam, tol, r_max)
        rows.append({"beta": b, "lambda": lam, "threshold_r": r,
                     "threshold_db": None if r is None else teleport.db_from_r(r),
                     "benchmark": teleport.benchmark_value(b, lam)})
    return rows, extra


def cmd_sample_prior(opt):
    kind = opt["kind"]
    n = int(opt["n"])
    if n < 1:
        raise ConfigError("n must be positive")
    rng = np.random.default_rng(int(opt["seed"]))
    if kind == "coherent":
        lam = _positive("lambda", parse_real(opt["lambda"], "lambda"), allow_inf=False)
        alpha, s, theta = priors.sample_coherent(lam, rng, n), np.zeros(n), np.zeros(n)
    elif kind == "squeezed":
        beta = _positive("beta", parse_real(opt["beta"], "beta"))
        s, theta = priors.sample_squeezing(beta, rng, n)
        alpha = np.zeros(n, dtype=complex)
    elif kind == "gaussian":
        lam = _positive("lambda", parse_real(opt["lambda"], "lambda"))
        beta = _positive("beta", parse_real(opt["beta"], "beta"))
        alpha, s, theta = priors.sample_gaussian_arrays(lam, beta, rng, n)
    else:
        raise ConfigError("kind must be coherent, squeezed or gaussian")
    rows = [{"alpha_re": float(a.real), "alpha_im": float(a.imag), "s": float(x), "theta": float(t)}
            for a, x, t in zip(np.atleast_1d(alpha), np.atleast_1d(s), np.atleast_1d(theta))]
    return rows, {}


def cmd_verify_all(opt):
    def report(res):
        print(res.line(), file=sys.stderr)
        for d in res.details:
            print("    " + d, file=sys.stderr)

    results = verify.run_all(quick=bool(opt["quick"]), on_result=report)
    rows = [{"number": r.number, "name": r.name, "passed": r.passed, "seconds": r.seconds,
             "budget": r.budget} for r in results]
    return rows, {"all_passed": all(r.passed for r in results)}


COMMANDS = {
    "cft": cmd_cft,
    "eigencheck": cmd_eigencheck,
    "srm-scan": cmd_srm_scan,
    "teleport-map": cmd_teleport_map,
    "threshold": cmd_threshold,
    "sample-prior": cmd_sample_prior,
    "verify-all": cmd_verify_all,
}

GLOBAL_DEFAULTS = {"seed": 0, "workers": 1, "out": None, "format": "csv"}

DEFAULTS = {
    "cft": {"lambda": None, "beta": None, "tol": 1e-10, "cutoff": 120, "k_max": 15},
    "eigencheck": {"lambda": None, "beta": None, "k_max": 4, "quad_tol": 1e-4, "gh_points": 24,
                   "cutoff": 120},
    "srm-scan": {"beta_grid": "1:30:log20", "k_max": srm.DEFAULT_KMAX, "no_tail_correction": False},
    "teleport-map": {"beta_grid": "0.1:50:log40", "r_grid": "0:2.5:26"},
    "threshold": {"beta_grid": "0.1:50:log40", "lambda": "inf", "tol": 1e-10, "r_max": teleport.R_MAX,
                  "minimize": False},
    "sample-prior": {"kind": "gaussian", "lambda": 1.0, "beta": 2.0, "n": 1000},
    "verify-all": {"quick": False},
}


# ------------------------------------------------------------------ output

def _cell(v):
    if v is None:
        return "never"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, np.generic):
        return _json_value(v.item())
    return v


def render(rows, columns, metadata, fmt):
    if fmt == "json":
        body = {"metadata": _json_value(metadata),
                "rows": [{c: _json_value(r.get(c)) for c in columns} for r in rows]}
        return json.dumps(body, indent=1) + "\n"
    buf = io.StringIO()
    for key, value in metadata.items():
        buf.write("# %s: %s\n" % (key, json.dumps(_json_value(value))))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


# ------------------------------------------------------------------ parsing

def build_parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--workers", type=int, help="parallel workers (default 1)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    common.add_argument("--config", help="JSON config file; command-line options override it")

    p = argparse.ArgumentParser(prog="gaussbench", parents=[common], argument_default=argparse.SUPPRESS,
                                description="Fidelity thresholds for Gaussian states and their numerical checks.")
    p.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = p.add_subparsers(dest="command", metavar="command")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, argument_default=argparse.SUPPRESS)

    c = add("cft", "threshold for a Gaussian ensemble, closed form plus a numerical route")
    c.add_argument("--lambda", dest="lambda", help="displacement inverse width, or inf")
    c.add_argument("--beta", help="squeezing inverse width, or inf")
    c.add_argument("--tol", help="quadrature tolerance")
    c.add_argument("--cutoff", type=int, help="Fock cutoff for the operator route")
    c.add_argument("--k-max", dest="k_max", type=int, help="photon-pair blocks for the operator route")

    c = add("eigencheck", "block eigenvalues of the measure-and-prepare operator")
    c.add_argument("--lambda", dest="lambda", help="displacement inverse width, or inf")
    c.add_argument("--beta")
    c.add_argument("--k-max", dest="k_max", type=int)
    c.add_argument("--quad-tol", dest="quad_tol")
    c.add_argument("--gh-points", dest="gh_points", type=int)
    c.add_argument("--cutoff", type=int)

    c = add("srm-scan", "square-root measurement fidelity optimized over its width")
    c.add_argument("--beta-grid", dest="beta_grid", help="lo:hi:N, lo:hi:logN or a,b,c")
    c.add_argument("--k-max", dest="k_max", type=int, help="series cutoff")
    c.add_argument("--no-tail-correction", dest="no_tail_correction", action="store_true",
                   help="optimize the raw partial sum")

    c = add("teleport-map", "average teleportation fidelity and benchmark flags on a grid")
    c.add_argument("--beta-grid", dest="beta_grid")
    c.add_argument("--r-grid", dest="r_grid")

    c = add("threshold", "smallest resource squeezing that beats the benchmark")
    c.add_argument("--beta-grid", dest="beta_grid")
    c.add_argument("--beta", dest="beta_grid", help="single beta (alias of --beta-grid)")
    c.add_argument("--lambda", dest="lambda", help="benchmark displacement width: 0, finite or inf")
    c.add_argument("--tol")
    c.add_argument("--r-max", dest="r_max")
    c.add_argument("--minimize", action="store_true", help="report the minimum over the beta range")

    c = add("sample-prior", "draw parameters from a prior")
    c.add_argument("--kind", choices=("coherent", "squeezed", "gaussian"))
    c.add_argument("--lambda", dest="lambda")
    c.add_argument("--beta")
    c.add_argument("--n", type=int)

    c = add("verify-all", "run the acceptance checks")
    c.add_argument("--quick", action="store_true", help="only the stated acceptance checks")
    return p


def _load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc.strerror)) from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config %s, line %d column %d: %s" % (path, exc.lineno, exc.colno, exc.msg)) from None
    if not isinstance(cfg, dict):
        raise ConfigError("config %s must hold a JSON object" % path)
    return {k.replace("-", "_") if k not in COMMANDS else k: v for k, v in cfg.items()}


def merge_options(given):
    """Defaults, then config file, then command-line options."""
    cfg = _load_config(given["config"]) if "config" in given else {}
    command = given.get("command") or cfg.get("command")
    if command not in COMMANDS:
        raise ConfigError("no command given (choose from %s)" % ", ".join(COMMANDS))
    allowed = dict(GLOBAL_DEFAULTS, **DEFAULTS[command])
    unknown = sorted(set(cfg) - set(allowed) - {"command"})
    if unknown:
        raise ConfigError("config key(s) not valid for %s: %s" % (command, ", ".join(unknown)))
    opt = dict(allowed)
    opt.update({k: v for k, v in cfg.items() if k != "command"})
    opt.update({k: v for k, v in given.items() if k not in ("command", "config")})
    missing = [k for k, v in opt.items() if v is None and k != "out"]
    if missing:
        raise ConfigError("%s needs --%s" % (command, ", --".join(m.replace("_", "-") for m in missing)))
    if opt["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    if int(opt["workers"]) < 1:
        raise ConfigError("workers must be at least 1")
    return command, opt


def run(argv=None):
    """Parse ``argv``, run the command and write its output; returns the exit status."""
    parser = build_parser()
    try:
        given = vars(parser.parse_args(argv))
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    try:
        command, opt = merge_options(given)
        rows, extra = COMMANDS[command](opt)
    except ConfigError as exc:
        print("gaussbench: error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print("gaussbench: error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, FloatingPointError, OverflowError) as exc:
        print("gaussbench: numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    schema = load_schema()
    metadata = {
        "tool": "gaussbench", "version": __version__, "schema_version": schema["schema_version"],
        "command": command,
        "parameters": {k: v for k, v in sorted(opt.items()) if k not in ("out", "format")},
        "seed": opt["seed"], "started_utc": started.isoformat(timespec="seconds"),
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    metadata.update(extra)
    text = render(rows, schema["commands"][command]["columns"], metadata, opt["format"])
    if opt["out"]:
        tmp = opt["out"] + ".tmp"
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, opt["out"])
    else:
        sys.stdout.write(text)
    if command == "verify-all" and not extra["all_passed"]:
        return EXIT_VERIFY
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

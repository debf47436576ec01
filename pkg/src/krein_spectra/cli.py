"""Command line entry point: ``krein-spectra <mode> --config <path>``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 invariant violation (a count above the Krein bound, or a failed check).
"""
import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__, bounds
from .basis import build_basis
from .config import MODES, parse_config
from .errors import ConfigError, NumericalError
from .forms import assemble_forms, write_matrix
from .spectra import (
    counting_curve,
    default_lambda_grid,
    friedrichs_spectrum,
    krein_positive_spectrum,
    oracle_1d_krein,
)
from .verify import run_verify

log = logging.getLogger("krein_spectra")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INVARIANT = 0, 1, 2, 3


def fmt(value):
    """Fixed 12-significant-digit rendering used for every CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def to_csv(header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


class RunReport:
    def __init__(self, cfg):
        self.config = cfg.echo()
        self.header = []
        self.rows = []
        self.results = {}
        self.checks = []
        self.timings = {}
        self.exit_code = EXIT_OK

    def flag(self, name, certifies, passed, detail=""):
        self.checks.append({"name": name, "certifies": certifies, "passed": bool(passed), "detail": detail})
        if not passed:
            self.exit_code = EXIT_INVARIANT

    def csv(self):
        return to_csv(self.header, self.rows)

    def as_dict(self):
        return {
            "version": __version__,
            "config": self.config,
            "columns": self.header,
            "rows": [[_plain(v) for v in row] for row in self.rows],
            "results": self.results,
            "checks": self.checks,
            "timings": self.timings,
            "exit_code": self.exit_code,
        }


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v]
    return v


def _forms(cfg, report):
    t0 = time.perf_counter()
    forms = assemble_forms(build_basis(cfg.domain, cfg.basis_spec()))
    report.timings["assemble"] = time.perf_counter() - t0
    report.results["trial_space_size"] = forms.size
    if cfg.dump_matrices:
        os.makedirs(cfg.dump_matrices, exist_ok=True)
        for name, mat in (("A", forms.A), ("B", forms.B), ("M", forms.M)):
            write_matrix(os.path.join(cfg.dump_matrices, f"{name}.txt"), mat)
    return forms


def _lambda_grid(cfg, krein_values):
    if cfg.lambdas is not None:
        return np.array(cfg.lambdas, dtype=float)
    if cfg.lambda_min is not None:
        count = int(np.floor(np.log(cfg.lambda_max / cfg.lambda_min) / np.log(cfg.lambda_ratio) + 1e-12)) + 1
        return cfg.lambda_min * cfg.lambda_ratio ** np.arange(count)
    return default_lambda_grid(krein_values, cfg.lambda_ratio)


def run_spectrum(cfg, report):
    forms = _forms(cfg, report)
    t0 = time.perf_counter()
    krein = krein_positive_spectrum(forms, cfg.eigensolver)
    fried = friedrichs_spectrum(forms, cfg.eigensolver)
    report.timings["eigensolve"] = time.perf_counter() - t0
    report.header = ["index", "krein_eigenvalue", "friedrichs_eigenvalue"]
    report.rows = [(j + 1, k, f) for j, (k, f) in enumerate(zip(krein.eigenvalues, fried.eigenvalues))]
    report.results["max_residual"] = max(krein.max_residual, fried.max_residual)
    report.flag("positive_spectrum", "all buckling eigenvalues are strictly positive",
                np.all(krein.eigenvalues > 0))
    report.flag("friedrichs_krein_ordering", "mu_F,j <= lambda_K,j",
                np.all(fried.eigenvalues <= krein.eigenvalues * (1 + 1e-12)))


def run_count(cfg, report):
    forms = _forms(cfg, report)
    t0 = time.perf_counter()
    if cfg.lambdas is None and cfg.lambda_min is None:
        grid = _lambda_grid(cfg, krein_positive_spectrum(forms, cfg.eigensolver).eigenvalues)
    else:
        grid = _lambda_grid(cfg, None)
    curve = counting_curve(forms, grid, friedrichs=cfg.friedrichs)
    report.timings["count"] = time.perf_counter() - t0
    report.header = ["lambda", "count", "krein_bound", "weyl", "friedrichs_count"]
    fcounts = curve.friedrichs_counts if cfg.friedrichs else [""] * len(grid)
    report.rows = list(zip(curve.lambdas, curve.counts, curve.bound_values, curve.weyl_values, fcounts))
    report.results["on_eigenvalue"] = [float(x) for x in curve.lambdas[curve.on_eigenvalue]]
    bad = curve.bound_violations()
    report.flag("krein_count_bound",
                "N_h(lambda) <= (2pi)^-n v_n |Omega| (1 + 2m/(2m+n))^(n/2m) lambda^(n/2m)",
                bad.size == 0, f"violations at lambda = {[float(x) for x in curve.lambdas[bad]]}" if bad.size else "")
    if cfg.friedrichs:
        report.flag("friedrichs_krein_ordering", "N(lambda, Friedrichs) >= N(lambda, Krein)",
                    np.all(curve.friedrichs_counts >= curve.counts))


def run_bound_table(cfg, report):
    t0 = time.perf_counter()
    report.header = ["n", "m", "v_n", "krein_constant", "laptev_constant", "weyl_constant",
                     "numeric_minimum", "alpha_star", "rel_error"]
    all_ok = True
    for n in range(1, cfg.n_max + 1):
        for m in range(1, cfg.m_max + 1):
            res = bounds.minimize_constant(n, m)
            pre = (2 * np.pi) ** (-n) * bounds.unit_ball_volume(n)
            kc = pre * bounds.krein_factor(n, m)
            lc = pre * bounds.laptev_factor(n, m)
            report.rows.append((n, m, bounds.unit_ball_volume(n), kc, lc, pre, res.value, res.alpha_star,
                                res.rel_error))
            all_ok &= kc < lc and res.rel_error <= 1e-6
    report.timings["bound_table"] = time.perf_counter() - t0
    report.flag("bound_table", "Krein constant < Friedrichs constant and numeric minimum = closed form",
                all_ok)


def run_oracle(cfg, report):
    vals = oracle_1d_krein((cfg.domain.a, cfg.domain.b), cfg.how_many, m=cfg.m)
    report.header = ["index", "eigenvalue"]
    report.rows = [(j + 1, v) for j, v in enumerate(vals)]


def run_verify_mode(cfg, report):
    t0 = time.perf_counter()
    lambdas = None
    if cfg.lambdas is not None or cfg.lambda_min is not None:
        lambdas = _lambda_grid(cfg, None)
    _, checks = run_verify(cfg.domain, cfg.basis_spec(), cfg.seed, lambdas, cfg.lambda_ratio,
                           cfg.eigensolver)
    report.timings["verify"] = time.perf_counter() - t0
    report.header = ["check", "passed", "detail", "certifies"]
    for c in checks:
        report.rows.append((c.name, c.passed, '"' + c.detail.replace('"', "'") + '"', '"' + c.certifies + '"'))
        report.flag(c.name, c.certifies, c.passed, c.detail)


RUNNERS = {
    "spectrum": run_spectrum,
    "count": run_count,
    "bound-table": run_bound_table,
    "oracle": run_oracle,
    "verify": run_verify_mode,
}


def run(cfg):
    """Execute a parsed configuration and return its :class:`RunReport`."""
    report = RunReport(cfg)
    t0 = time.perf_counter()
    RUNNERS[cfg.mode](cfg, report)
    report.timings["total"] = time.perf_counter() - t0
    return report


def build_parser():
    p = argparse.ArgumentParser(prog="krein-spectra", description=__doc__.splitlines()[0])
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--json", action="store_true", help="emit the JSON report instead of CSV")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--seed", type=int, help="seed for randomized checks (overrides the config)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        cfg = parse_config(text, mode=args.mode)
        if args.seed is not None:
            cfg.seed = args.seed
    except (OSError, UnicodeDecodeError) as exc:
        print(f"krein-spectra: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"krein-spectra: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run(cfg)
    except ConfigError as exc:
        print(f"krein-spectra: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"krein-spectra: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    as_json = args.json or cfg.json
    text = json.dumps(report.as_dict(), indent=2) + "\n" if as_json else report.csv()
    out = args.out or cfg.out
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for c in report.checks:
        if not c["passed"]:
            log.error("invariant violated: %s (%s) %s", c["name"], c["certifies"], c["detail"])
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

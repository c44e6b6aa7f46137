"""Command-line front end.

Subcommands mirror the experiment pipelines: ``zeros``, ``moments``,
``sigma``, ``explicit``, ``divisors``, ``scan-large``.  Every report
embeds the fully resolved configuration and a ``schema: 1`` tag; file
writes go through a temp-file rename so partial output never lands under
the target name.  Identical configuration plus identical cache yields
byte-identical output regardless of --threads.

Exit codes: 0 ok, 2 usage error, 3 numerical inconsistency,
4 missed zeros.
"""

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (EvaluationRangeError, InconsistentZeroError, MissedZerosError,
                     NumericalInconsistencyError, ZetamomentsError)
from .explicit import CSV_HEADER, report_csv_row, verify_explicit_formula
from .moments import (compute_moment_report, default_xi, large_value_scan, moment_jk,
                      scaling_fit, sigma2_interchange_check, zeta_prime_profile)
from .parallel import resolve_threads
from .sieve import divisor_sum, tau_k_truncated, truncated_square_sum, write_coefficients_csv
from .zeros import ZeroSet, cache_dir, cache_store, count_zeros_rvm, find_zeros, \
    import_zeros, load_or_compute

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_MISSED_ZEROS = 4


@dataclass
class ExperimentConfig:
    """Resolved run configuration; echoed verbatim into every report."""

    command: str
    T: float = 1000.0
    k: int = 1
    xi: float | None = None
    xi_mode: str = "auto"
    zero_source: str = "cache"
    import_path: str | None = None
    output_format: str = "json"
    output_path: str | None = None
    threads: int = 1
    cache_directory: str | None = None
    x_values: list = field(default_factory=list)
    A: float = 1.0
    l: int = 1
    x: float = 1000.0
    dump_path: str | None = None
    t_series: list = field(default_factory=list)

    def resolve(self) -> None:
        if self.command in ("zeros", "moments", "sigma", "explicit", "scan-large"):
            for T in [self.T, *self.t_series]:
                if not (10.0 <= T <= 1.0e5):
                    raise EvaluationRangeError(f"T must be in [10, 1e5], got {T}")
        if self.command in ("moments", "sigma"):
            if not (1 <= self.k <= 4):
                raise EvaluationRangeError(f"k must be in [1, 4] at desk scale, got {self.k}")
        if self.xi_mode == "auto":
            self.xi = default_xi(self.T, self.k)

    def to_dict(self) -> dict:
        # threads is deliberately not echoed: it is an execution knob that
        # cannot change any computed value, and reports must be
        # byte-identical across worker counts.
        return {
            "command": self.command,
            "T": self.T,
            "k": self.k,
            "xi": self.xi,
            "xi_mode": self.xi_mode,
            "zero_source": self.zero_source,
            "import_path": self.import_path,
            "output_format": self.output_format,
            "output_path": self.output_path,
            "cache_directory": str(cache_dir(self.cache_directory)),
            "x_values": list(self.x_values),
            "A": self.A,
            "l": self.l,
            "x": self.x,
            "t_series": list(self.t_series),
        }


def _toolchain() -> dict:
    return {
        "package": f"zetamoments {__version__}",
        "python": sys.version.split()[0],
        "numpy": np.__version__,
    }


def _atomic_write_text(path: str, data: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=target.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(config: ExperimentConfig, payload: dict, csv_lines: list[str] | None = None) -> None:
    """Write the report file (JSON or CSV) if an output path was given."""
    if config.output_path is None:
        return
    if config.output_format == "json":
        doc = {"schema": 1, "config": config.to_dict(), "toolchain": _toolchain(),
               "report": payload}
        _atomic_write_text(config.output_path,
                           json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        lines = csv_lines if csv_lines is not None else \
            [",".join(payload), ",".join(repr(v) for v in payload.values())]
        _atomic_write_text(config.output_path, "\n".join(lines) + "\n")


def _load_zeros(config: ExperimentConfig) -> ZeroSet:
    if config.zero_source == "compute":
        zeros = find_zeros(config.T, threads=config.threads)
        cache_store(zeros, config.cache_directory)
        return zeros
    if config.zero_source == "import":
        if not config.import_path:
            raise EvaluationRangeError("--zero-source import requires --import-path")
        return import_zeros(config.import_path, config.T)
    return load_or_compute(config.T, threads=config.threads,
                           directory=config.cache_directory)


# ---------------------------------------------------------------------------
# Subcommand pipelines
# ---------------------------------------------------------------------------

def _run_zeros(config: ExperimentConfig) -> int:
    zeros = _load_zeros(config)
    rvm = count_zeros_rvm(config.T)
    payload = {
        "T": config.T,
        "count": len(zeros),
        "rvm_estimate": rvm,
        "provenance": zeros.provenance,
        "first": list(map(float, zeros.gammas[:3])),
        "gammas": list(map(float, zeros.gammas)),
    }
    csv_lines = ["index,gamma"] + [f"{i},{float(g)!r}" for i, g in
                                   enumerate(zeros.gammas, start=1)]
    _emit(config, payload, csv_lines)
    print(f"zeros: T={config.T:g} count={len(zeros)} rvm={rvm:.2f} "
          f"provenance={zeros.provenance}")
    return EXIT_OK


def _run_moments(config: ExperimentConfig) -> int:
    if config.t_series:
        return _run_moment_series(config)
    zeros = _load_zeros(config)
    report = compute_moment_report(zeros, config.k, config.xi, threads=config.threads)
    csv_lines = [
        "k,T,xi,n_zeros,jk,jk_unnormalized,re_sigma1,im_sigma1,sigma2,holder_bound",
        ",".join(repr(v) for v in (
            float(config.k), report.T, report.xi, float(report.n_zeros), report.jk,
            report.jk_unnormalized, report.sigma1.real, report.sigma1.imag,
            report.sigma2, report.holder_bound)),
    ]
    _emit(config, report.to_dict(), csv_lines)
    print(f"moments: T={config.T:g} k={config.k} xi={config.xi:.6g} "
          f"n_zeros={report.n_zeros} jk={report.jk:.6e} "
          f"holder_bound={report.holder_bound:.6e}")
    return EXIT_OK


def _run_moment_series(config: ExperimentConfig) -> int:
    """(T, J_k) series over increasing heights, for plotting and fits."""
    heights = sorted(config.t_series)
    top = ExperimentConfig(**{**config.__dict__, "T": heights[-1]})
    zeros = _load_zeros(top)
    profile = np.abs(zeta_prime_profile(zeros, config.threads))
    rows = []
    for T in heights:
        mask = zeros.gammas <= T
        subset = ZeroSet(T, zeros.gammas[mask], zeros.provenance, zeros.refine_tolerance)
        rep = moment_jk(subset, config.k, zeta_prime_abs=profile[mask])
        rows.append((T, rep.n_zeros, rep.jk))
    exponent = scaling_fit([(T, jk) for T, _, jk in rows]) if len(rows) >= 3 else None
    payload = {
        "k": config.k,
        "series": [{"T": T, "n_zeros": n, "jk": jk} for T, n, jk in rows],
        "fitted_exponent": exponent,
    }
    csv_lines = ["T,n_zeros,jk"] + [f"{T!r},{n},{jk!r}" for T, n, jk in rows]
    _emit(config, payload, csv_lines)
    fitted = "n/a" if exponent is None else f"{exponent:.3f}"
    print(f"moments-series: k={config.k} heights={len(rows)} "
          f"max T={heights[-1]:g} fitted exponent={fitted}")
    return EXIT_OK


def _run_sigma(config: ExperimentConfig) -> int:
    zeros = _load_zeros(config)
    report = compute_moment_report(zeros, config.k, config.xi, threads=config.threads)
    logt = math.log(config.T)
    payload = report.to_dict()
    # growth ratios recorded, not asserted: the bounds carry unspecified constants
    payload["sigma1_growth_ratio"] = abs(report.sigma1) / (config.T * logt ** (config.k**2 + 2))
    payload["sigma2_growth_ratio"] = report.sigma2 / (config.T * logt ** (config.k**2 + 1))
    if int(math.floor(config.xi)) ** config.k <= 200:
        payload["interchange_residual"] = sigma2_interchange_check(zeros, config.k, config.xi)
    _emit(config, payload)
    print(f"sigma: T={config.T:g} k={config.k} xi={config.xi:.6g} "
          f"|sigma1|={abs(report.sigma1):.6e} sigma2={report.sigma2:.6e} "
          f"holder_bound={report.holder_bound:.6e}")
    return EXIT_OK


def _run_explicit(config: ExperimentConfig) -> int:
    zeros = _load_zeros(config)
    xs = config.x_values or [2.0]
    lines = [CSV_HEADER]
    reports = []
    for x in xs:
        rep = verify_explicit_formula(zeros, x)
        reports.append(rep)
        lines.append(report_csv_row(rep))
    payload = {
        "rows": [
            {"x": r.x, "T": r.T, "lhs": {"re": r.lhs.real, "im": r.lhs.imag},
             "main_term": r.main_term, "px_distance": r.px_distance,
             "error_terms": list(r.error_terms), "residual": r.residual,
             "residual_over_budget": r.residual / r.budget}
            for r in reports
        ]
    }
    _emit(config, payload, lines)
    for line in lines:
        print(line)
    worst = max(r.residual / r.budget for r in reports)
    print(f"explicit: T={config.T:g} points={len(reports)} "
          f"max residual/budget={worst:.4f}")
    return EXIT_OK


def _run_divisors(config: ExperimentConfig) -> int:
    value = divisor_sum(config.k, config.l, config.x)
    payload = {"k": config.k, "l": config.l, "x": config.x, "divisor_sum": value}
    if config.xi is not None and config.xi_mode != "auto":
        payload["truncated_square_sum"] = truncated_square_sum(config.k, config.xi)
        if config.dump_path:
            write_coefficients_csv(tau_k_truncated(config.k, config.xi), config.dump_path)
    _emit(config, payload)
    print(f"divisors: k={config.k} l={config.l} x={config.x:g} sum={value:.10g}")
    return EXIT_OK


def _run_scan_large(config: ExperimentConfig) -> int:
    zeros = _load_zeros(config)
    profile = np.abs(zeta_prime_profile(zeros, config.threads))
    hits = large_value_scan(zeros, config.A, zeta_prime_abs=profile)
    lines = ["gamma,zeta_prime_abs"] + [f"{g!r},{v!r}" for g, v in hits]
    payload = {"A": config.A, "T": config.T, "count": len(hits),
               "hits": [{"gamma": g, "zeta_prime_abs": v} for g, v in hits]}
    _emit(config, payload, lines)
    print(f"scan-large: T={config.T:g} A={config.A:g} hits={len(hits)} "
          f"of {len(zeros)} zeros")
    return EXIT_OK


_PIPELINES = {
    "zeros": _run_zeros,
    "moments": _run_moments,
    "sigma": _run_sigma,
    "explicit": _run_explicit,
    "divisors": _run_divisors,
    "scan-large": _run_scan_large,
}


def run(config: ExperimentConfig) -> int:
    """Execute one configured pipeline; returns a process exit code."""
    try:
        config.resolve()
        return _PIPELINES[config.command](config)
    except MissedZerosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSED_ZEROS
    except (NumericalInconsistencyError, InconsistentZeroError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ZetamomentsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--T", type=float, default=1000.0, help="zero height (10..1e5)")
    p.add_argument("--threads", default="1",
                   help="worker count or 'auto' (results are thread-count independent)")
    p.add_argument("--zero-source", choices=("compute", "cache", "import"),
                   default="cache", dest="zero_source")
    p.add_argument("--import-path", dest="import_path", default=None,
                   help="ordinate table for --zero-source import")
    p.add_argument("--cache-dir", dest="cache_directory", default=None,
                   help="override cache directory (else $ZETAMOMENTS_CACHE_DIR)")
    p.add_argument("--output", dest="output_path", default=None,
                   help="report file path")
    p.add_argument("--format", dest="output_format", choices=("json", "csv"),
                   default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zetamoments",
        description="Desk-scale moments of zeta'(rho) over Riemann zeta zeros",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeros", help="locate/cache zeros up to height T")
    _add_common(p)

    for name in ("moments", "sigma"):
        p = sub.add_parser(name, help=f"compute the {name} pipeline")
        _add_common(p)
        p.add_argument("--k", type=int, default=1, help="moment order (1..4)")
        p.add_argument("--xi", default="auto",
                       help="Dirichlet polynomial length, or 'auto' = T^(1/(4k))")

    p = sub.add_parser("explicit", help="explicit-formula residuals at points x")
    _add_common(p)
    p.add_argument("--x", dest="x_values", default="2",
                   help="comma-separated x values (> 1)")

    p = sub.add_parser("divisors", help="divisor sums and truncated square sums")
    _add_common(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--x", type=float, default=1000.0, help="upper limit of sum")
    p.add_argument("--xi", default="auto", help="truncation point for tau_k(.; xi)")
    p.add_argument("--dump", dest="dump_path", default=None,
                   help="CSV dump of the truncated coefficient vector")

    p = sub.add_parser("scan-large", help="zeros with |zeta'(rho)| >= (log gamma)^A")
    _add_common(p)
    p.add_argument("--A", type=float, default=1.0)

    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig(command=args.command)
    config.T = getattr(args, "T", config.T)
    config.threads = resolve_threads(getattr(args, "threads", 1))
    config.zero_source = getattr(args, "zero_source", config.zero_source)
    config.import_path = getattr(args, "import_path", None)
    config.cache_directory = getattr(args, "cache_directory", None)
    config.output_path = getattr(args, "output_path", None)
    config.output_format = getattr(args, "output_format", "json")
    config.k = getattr(args, "k", config.k)
    config.l = getattr(args, "l", config.l)
    config.A = getattr(args, "A", config.A)
    config.dump_path = getattr(args, "dump_path", None)
    if hasattr(args, "x_values"):
        config.x_values = [float(tok) for tok in str(args.x_values).split(",") if tok]
    if hasattr(args, "x") and args.command == "divisors":
        config.x = args.x
    xi = getattr(args, "xi", "auto")
    if xi == "auto":
        config.xi_mode = "auto"
    else:
        config.xi_mode = "explicit"
        config.xi = float(xi)
    return config


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = config_from_args(args)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

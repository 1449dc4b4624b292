"""ZML CLI: command-line front end for the zeta moments laboratory.

Every command resolves a ``RunConfig`` (defaults, then ``--config``
file, then ``ZML_CACHE_DIR``, then explicit flags), writes a CSV, and
records a manifest next to the CSV and in ``<cache_dir>/runs.jsonl``.

Exit codes: 0 success, 1 a hard invariant or check failed, 2 usage,
domain or precondition errors.
"""

from __future__ import annotations

import functools
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import click
from click.core import ParameterSource
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from zml import __version__
from zml.config import RunConfig, load_config_file, resolve_config
from zml.errors import AuditMismatchError, InvariantViolation, ZmlError
from zml.log import configure_logging
from zml.manifest import ManifestStore, RunManifest, write_sidecar
from zml.report import CheckReport, write_csv

console = Console()
err_console = Console(stderr=True)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


@dataclass
class Outcome:
    """What a command body hands back to the runner."""

    results: dict = field(default_factory=dict)
    outputs: list[Path] = field(default_factory=list)
    report: CheckReport | None = None
    passed: bool = True


# ── Runner ───────────────────────────────────────────────────────────


def common_options(fn):
    """Options every command accepts."""
    options = [
        click.option("--config", "config", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="YAML config file; explicit flags win"),
        click.option("--seed", type=int, default=None, help="64-bit seed"),
        click.option("--threads", default="1", show_default=True,
                     help="Worker processes, or 'auto'"),
        click.option("--cache-dir", "cache_dir", envvar="ZML_CACHE_DIR", default=None,
                     help="Zero cache and run history directory [env: ZML_CACHE_DIR]"),
        click.option("--out", "-o", "output", default=None, help="CSV output path"),
        click.option("--verbose", "-v", is_flag=True, help="Debug logging"),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def zml_command(group: click.Group, name: str, command_id: str | None = None, **kwargs):
    """Register ``fn(cfg) -> Outcome`` as a command wrapped by the run protocol."""

    def decorator(body):
        @group.command(name=name, **kwargs)
        @common_options
        @functools.wraps(body)
        def wrapper(**_):
            _execute(command_id or name, body)

        return wrapper

    return decorator


def _explicit(ctx: click.Context) -> set[str]:
    sources = (ParameterSource.COMMANDLINE, ParameterSource.ENVIRONMENT)
    return {name for name in ctx.params if ctx.get_parameter_source(name) in sources}


def _execute(command: str, body) -> None:
    ctx = click.get_current_context()
    params = dict(ctx.params)
    config_path = params.pop("config")
    configure_logging(params.pop("verbose"))
    start = time.perf_counter()

    cfg: RunConfig | None = None
    outcome = Outcome()
    try:
        file_data = load_config_file(config_path) if config_path else None
        cfg = resolve_config(command, params, _explicit(ctx), file_data)
        outcome = body(cfg)
        code = EXIT_OK if outcome.passed else EXIT_FAILED
    except (InvariantViolation, AuditMismatchError) as e:
        err_console.print(f"[red]FAILED[/] {type(e).__name__}: {e}")
        code = EXIT_FAILED
    except ZmlError as e:
        err_console.print(f"[red]error[/] {type(e).__name__}: {e}")
        code = EXIT_USAGE

    if outcome.report is not None:
        _print_report(outcome.report)
    if cfg is not None:
        _record(cfg, outcome, code, time.perf_counter() - start)
    ctx.exit(code)


def _record(cfg: RunConfig, outcome: Outcome, code: int, wall: float) -> None:
    manifest = RunManifest(
        command=cfg.command,
        config=cfg.to_dict(),
        results=outcome.results,
        outputs=[str(p) for p in outcome.outputs],
        wall_time_s=wall,
        exit_code=code,
    )
    if outcome.outputs:
        sidecar = write_sidecar(manifest, outcome.outputs[0])
        console.print(f"[green]Wrote[/] {', '.join(map(str, outcome.outputs))} (+ {sidecar.name})")
    ManifestStore(cfg.cache_dir).record(manifest)


def _print_report(report: CheckReport) -> None:
    style = "green" if report.passed else "red"
    console.print(Panel(report.summary(), title=report.name, border_style=style))
    for issue in report.errors:
        console.print(f"  [red]x[/] [{issue.code}] {issue.message} {issue.where}")
    for issue in report.warnings:
        console.print(f"  [yellow]![/] [{issue.code}] {issue.message} {issue.where}")


def _output(cfg: RunConfig, default: str) -> Path:
    return cfg.output or Path(default)


def _zero_table(cfg: RunConfig, lo: float, hi: float):
    """A cached table covering [lo, hi], scanning from 10 and caching when none exists."""
    from zml.engine import VALIDITY_FLOOR
    from zml.zeros.cache import ZeroCache
    from zml.zeros.scan import scan_zeros

    cache = ZeroCache(cfg.cache_dir)
    table = cache.find_covering(lo, hi)
    if table is None:
        top = math.ceil(hi) + 1.0
        logger.info("no cached table covers [%g, %g]; scanning [%g, %g]", lo, hi,
                    VALIDITY_FLOOR, top)
        table = scan_zeros(VALIDITY_FLOOR, top, workers=cfg.workers)
        cache.save(table)
    return table


def _results_table(title: str, rows: dict) -> None:
    table = Table(title=title)
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    for key, value in rows.items():
        table.add_row(key, f"{value:.10g}" if isinstance(value, float) else str(value))
    console.print(table)


@click.group()
@click.version_option(version=__version__)
def main():
    """ZML: Zeta Moments Laboratory.

    Desk-scale experiments on moments of the Riemann zeta-function on
    the critical line: zero tables, the approximate formula for log
    zeta, the multi-range partition and the random Euler-product model.
    """


# ── Constants ────────────────────────────────────────────────────────


@zml_command(main, "constants-sweep")
@click.option("--n", "n", default=101, show_default=True, help="Number of theta points")
@click.option("--tol", default=1e-12, show_default=True, help="Optimizer tolerance")
def constants_sweep(cfg: RunConfig) -> Outcome:
    """Optimal h(theta) and A(h, theta) over theta in [0, pi/2]."""
    from zml.constants import theta_sweep

    p = cfg.parameters
    sweep = theta_sweep(int(p["n"]), float(p["tol"]), cfg.workers)
    out = _output(cfg, "constants.csv")
    write_csv(out, ("theta", "h_star", "A_star", "a", "b"),
              ((pt.theta, pt.h_star, pt.A_star, pt.a_star, pt.b_star) for pt in sweep.points))
    first, last = sweep.points[0], sweep.points[-1]
    results = {"h0": first.h_star, "A0": first.A_star, "h_pi2": last.h_star,
               "A_pi2": last.A_star, "max_violation": sweep.max_violation}
    _results_table("Constants sweep", results)
    return Outcome(results, [out], sweep.report, sweep.report.passed)


# ── Zeros ────────────────────────────────────────────────────────────


@main.group()
def zeros():
    """Scan, ingest, audit and list zero tables."""


def _write_table(out: Path, table) -> None:
    write_csv(out, ("index", "gamma"), enumerate(table.gammas.tolist(), start=1))


@zml_command(zeros, "scan", "zeros scan")
@click.option("--from", "t_from", default=10.0, show_default=True, help="Lower height")
@click.option("--to", "t_to", default=1000.0, show_default=True, help="Upper height")
@click.option("--grid-factor", default=8.0, show_default=True, help="Samples per mean gap")
@click.option("--cache/--no-cache", default=False, help="Store the table in the cache")
@click.option("--strict/--no-strict", default=True, help="Fail on an unresolved count mismatch")
def zeros_scan(cfg: RunConfig) -> Outcome:
    """Locate zeros of Z(t) between Gram-audited bounds."""
    from zml.zeros.cache import ZeroCache
    from zml.zeros.scan import scan_zeros_with_report

    p = cfg.parameters
    table, report = scan_zeros_with_report(float(p["t_from"]), float(p["t_to"]),
                                           float(p["grid_factor"]), cfg.workers,
                                           bool(p["strict"]))
    out = _output(cfg, "zeros.csv")
    _write_table(out, table)
    outputs = [out]
    if p["cache"]:
        outputs.append(ZeroCache(cfg.cache_dir).save(table))
    results = table.to_dict()
    console.print(f"[bold blue]ZML[/] {table.summary()}")
    return Outcome(results, outputs, report, report.passed)


@zml_command(zeros, "ingest", "zeros ingest")
@click.option("--path", "path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Ordinate file, one value per line")
@click.option("--cache/--no-cache", default=True, help="Store the table in the cache")
def zeros_ingest(cfg: RunConfig) -> Outcome:
    """Load an ordinate file as a zero table."""
    from zml.zeros.cache import ZeroCache
    from zml.zeros.ingest import ingest_zeros

    table = ingest_zeros(cfg.parameters["path"])
    out = _output(cfg, "zeros.csv")
    _write_table(out, table)
    outputs = [out]
    if cfg.parameters["cache"] and table.covered_range is not None:
        outputs.append(ZeroCache(cfg.cache_dir).save(table))
    console.print(f"[bold blue]ZML[/] {table.summary()}")
    return Outcome(table.to_dict(), outputs)


@zml_command(zeros, "audit", "zeros audit")
@click.option("--from", "t_from", default=10.0, show_default=True, help="Lower height")
@click.option("--to", "t_to", default=1000.0, show_default=True, help="Upper height")
def zeros_audit(cfg: RunConfig) -> Outcome:
    """Re-count cached zeros between good Gram points."""
    from zml.errors import CoverageError
    from zml.zeros.cache import ZeroCache
    from zml.zeros.scan import audit_table

    lo, hi = float(cfg.parameters["t_from"]), float(cfg.parameters["t_to"])
    table = ZeroCache(cfg.cache_dir).find_covering(lo, hi)
    if table is None:
        raise CoverageError((lo, hi), None)
    report = audit_table(table, lo, hi)
    out = _output(cfg, "audit.csv")
    write_csv(out, ("severity", "code", "message", "where"),
              ((i.severity.value, i.code, i.message, i.where) for i in report.issues))
    return Outcome(dict(report.measurements), [out], report, report.passed)


@zml_command(zeros, "list", "zeros list")
def zeros_list(cfg: RunConfig) -> Outcome:
    """List the cache index."""
    from zml.zeros.cache import ZeroCache

    entries = ZeroCache(cfg.cache_dir).list_entries()
    table = Table(title=f"Cached zero tables ({len(entries)})")
    for column in ("name", "count", "covered_range", "origin", "provenance"):
        table.add_column(column)
    for e in entries:
        table.add_row(e["name"], str(e["count"]), str(e["covered_range"]), e["origin"],
                      e["provenance"])
    console.print(table)
    out = _output(cfg, "zeros-index.csv")
    write_csv(out, ("name", "count", "lo", "hi", "origin", "provenance"),
              ((e["name"], e["count"], *(e["covered_range"] or (None, None)), e["origin"],
                e["provenance"]) for e in entries))
    return Outcome({"entries": len(entries)}, [out])


# ── Approximate formula ──────────────────────────────────────────────


@main.group()
def approx():
    """The approximate formula, the explicit formula and the zero/prime balance."""


@zml_command(approx, "residual", "approx residual")
@click.option("--t-min", default=100.0, show_default=True)
@click.option("--t-max", default=1000.0, show_default=True)
@click.option("--samples", default=500, show_default=True)
@click.option("--K", "K", default=50.0, show_default=True)
@click.option("--theta", default=0.0, show_default=True)
@click.option("--x-power", default=2.0, show_default=True, help="X = t^x_power")
@click.option("--tail-tol", default=1e-9, show_default=True)
def approx_residual(cfg: RunConfig) -> Outcome:
    """Residual of the approximate formula at random heights; asserts Y >= 0."""
    import numpy as np

    from zml.approx.checks import RESIDUAL_COLUMNS, residual_report
    from zml.approx.formula import ParamsPolicy
    from zml.zeros.density import mean_gap

    p = cfg.parameters
    t_min, t_max = float(p["t_min"]), float(p["t_max"])
    policy = ParamsPolicy(float(p["theta"]), float(p["K"]), float(p["x_power"]))
    margin = 4 * (policy(t_min).floor - 0.5) + 10 * mean_gap(t_max)
    table = _zero_table(cfg, 0.0, t_max + margin)
    ts = np.sort(np.random.default_rng(cfg.seed).uniform(t_min, t_max, int(p["samples"])))
    ts = table.nudge_off_zeros(ts, 1e-3)
    result = residual_report(ts, policy, table, cfg.workers, float(p["tail_tol"]))
    out = _output(cfg, "residual.csv")
    write_csv(out, RESIDUAL_COLUMNS, (r.as_row() for r in result.rows))
    console.print(f"[bold blue]ZML[/] {result.summary()}")
    return Outcome(result.distribution(), [out], result.report, result.report.passed)


@zml_command(approx, "explicit-formula", "approx explicit-formula")
@click.option("--s-re", default=2.0, show_default=True)
@click.option("--s-im", default=10.0, show_default=True)
@click.option("--X", "X", default=1e4, show_default=True)
@click.option("--n-zeros", default=650, show_default=True)
@click.option("--table-to", default=1100.0, show_default=True,
              help="Height the zero table must reach")
def approx_explicit_formula(cfg: RunConfig) -> Outcome:
    """Smoothed explicit formula for -zeta'/zeta(s) against its tail budget."""
    from zml.approx.checks import explicit_formula_check

    p = cfg.parameters
    table = _zero_table(cfg, 0.0, float(p["table_to"]))
    check = explicit_formula_check(complex(float(p["s_re"]), float(p["s_im"])), float(p["X"]),
                                   int(p["n_zeros"]), table)
    out = _output(cfg, "explicit-formula.csv")
    data = check.to_dict()
    write_csv(out, ("quantity", "re", "im"),
              ((k, complex(v).real, complex(v).imag) for k, v in data.items()
               if isinstance(v, (complex, float))))
    results = {"residual": check.residual, "tail_bound": check.tail_bound,
               "passed": check.passed}
    _results_table("Explicit formula", results)
    return Outcome(results, [out], passed=check.passed)


@zml_command(approx, "balance", "approx balance")
@click.option("--t", "t", default=500.0, show_default=True)
@click.option("--K", "K", default=50.0, show_default=True)
@click.option("--theta", default=0.0, show_default=True)
@click.option("--X", "X", default=None, type=float, help="Default t^2")
@click.option("--tail-tol", default=1e-9, show_default=True)
def approx_balance(cfg: RunConfig) -> Outcome:
    """Zero side against prime side at one height."""
    from zml.approx.formula import ApproxParams, minimal_window, sigma_select, zero_prime_balance

    p = cfg.parameters
    t = float(p["t"])
    X = float(p["X"]) if p["X"] is not None else t * t
    params = ApproxParams(theta=float(p["theta"]), K=float(p["K"]), X=X)
    table = _zero_table(cfg, 0.0, t + minimal_window(t, params.floor) + 1.0)
    params.check_point(t)
    sigma = sigma_select(t, params, table).sigma
    table.require_coverage(0.0, t + minimal_window(t, sigma))
    balance = zero_prime_balance(t, params, table, float(p["tail_tol"]))
    out = _output(cfg, "balance.csv")
    results = balance.to_dict()
    write_csv(out, tuple(results), [tuple(results.values())])
    _results_table("Zero/prime balance", results)
    return Outcome(results, [out])


# ── Moments ──────────────────────────────────────────────────────────


@zml_command(main, "moment")
@click.option("--k", "k", default=1.0, show_default=True)
@click.option("--theta", default=0.0, show_default=True)
@click.option("--T", "T", default=1000.0, show_default=True)
@click.option("--split", default=1, show_default=True, help="Panels per gap between zeros")
def moment(cfg: RunConfig) -> Outcome:
    """M_{k,theta}(T) by panel quadrature."""
    from zml.moments.quadrature import MOMENT_COLUMNS, moment_estimate

    p = cfg.parameters
    T = float(p["T"])
    table = _zero_table(cfg, 0.0, 2 * T)
    est = moment_estimate(float(p["k"]), float(p["theta"]), T, table, int(p["split"]),
                          cfg.workers)
    out = _output(cfg, "moment.csv")
    write_csv(out, MOMENT_COLUMNS, [est.as_row()])
    console.print(f"[bold blue]ZML[/] {est.summary()}")
    return Outcome(est.to_dict(), [out])


@zml_command(main, "tail")
@click.option("--theta", default=0.0, show_default=True)
@click.option("--T", "T", default=1000.0, show_default=True)
@click.option("--v-min", default=-2.0, show_default=True)
@click.option("--v-max", default=3.0, show_default=True)
@click.option("--v-count", default=26, show_default=True)
@click.option("--samples", default=10_000, show_default=True)
@click.option("--K", "K", default=10.0, show_default=True, help="K of the Gaussian overlay")
def tail(cfg: RunConfig) -> Outcome:
    """Empirical survival curve of Re e^{-i theta} log zeta over [T, 2T]."""
    import numpy as np

    from zml.moments.tail import gaussian_overlay, tail_survival

    p = cfg.parameters
    T = float(p["T"])
    table = _zero_table(cfg, 0.0, 2 * T)
    grid = np.linspace(float(p["v_min"]), float(p["v_max"]), int(p["v_count"]))
    curve = tail_survival(float(p["theta"]), T, grid, int(p["samples"]), table)
    overlay = gaussian_overlay(np.array([v for v, _ in curve.points]), T, float(p["K"]))
    out = _output(cfg, "tail.csv")
    write_csv(out, ("V", "survival", "gaussian_overlay"),
              ((v, s, float(g)) for (v, s), g in zip(curve.points, overlay)))
    console.print(f"[bold blue]ZML[/] {curve.summary()}")
    return Outcome({"n_samples": curve.n_samples, "points": len(curve.points)}, [out])


@zml_command(main, "bound-eval")
@click.option("--k", "k", default=0.1, show_default=True)
@click.option("--theta", default=math.pi / 2, show_default=True)
@click.option("--lam", default=None, type=float, help="Zero-density exponent lambda")
@click.option("--preset", default="ingham", show_default=True,
              type=click.Choice(["ingham", "selberg", "conrey", "density"]))
@click.option("--T", "T", default=1e6, show_default=True)
@click.option("--eps", default=0.01, show_default=True)
@click.option("--C1", "C1", default=1.0, show_default=True, help="Non-effective constant")
def bound_eval(cfg: RunConfig) -> Outcome:
    """Evaluate the three-term moment upper bound (and the envelope at theta = ±pi/2)."""
    from zml.moments.bounds import TERM_NAMES, theorem_bound_eval
    from zml.zeros.density import DENSITY_PRESETS

    p = cfg.parameters
    preset = DENSITY_PRESETS[p["preset"]]
    lam = float(p["lam"]) if p["lam"] is not None else preset.lam
    bound = theorem_bound_eval(float(p["k"]), float(p["theta"]), lam, preset.phi,
                               float(p["T"]), float(p["eps"]), float(p["C1"]))
    out = _output(cfg, "bound.csv")
    rows = [(name, value, log_value) for name, value, log_value
            in zip(TERM_NAMES, bound.terms.values(), bound.log_terms)]
    rows.append(("total", bound.total, bound.log_total))
    if bound.log_corollary is not None:
        rows.append(("corollary", bound.corollary, bound.log_corollary))
    write_csv(out, ("term", "value", "log_value"), rows)
    _results_table("Moment bound", {name: value for name, value, _ in rows})
    return Outcome(bound.to_dict(), [out])


# ── Partition ────────────────────────────────────────────────────────


def _parse_synthetic(specs) -> list[tuple[float, float]]:
    zeros = []
    for spec in specs or ():
        beta, _, gamma = str(spec).partition(":")
        try:
            zeros.append((float(beta), float(gamma)))
        except ValueError:
            raise click.BadParameter(f"expected beta:gamma, got {spec!r}") from None
    return zeros


@zml_command(main, "partition")
@click.option("--T", "T", default=1000.0, show_default=True)
@click.option("--k", "k", default=1.0, show_default=True)
@click.option("--K", "K", default=10.0, show_default=True)
@click.option("--theta", default=0.0, show_default=True)
@click.option("--samples", default=10_000, show_default=True)
@click.option("--L", "L", default=None, type=float, help="Override L")
@click.option("--delta", default=None, help="Comma-separated delta ladder, starting at 0")
@click.option("--threshold", default=None, type=float, help="Override the index threshold")
@click.option("--a-scale", default=1.0, show_default=True, help="Scale of the A thresholds")
@click.option("--synthetic", multiple=True, help="Off-line zero beta:gamma (repeatable)")
@click.option("--phi", default="selberg", show_default=True,
              type=click.Choice(["ingham", "selberg"]))
def partition(cfg: RunConfig) -> Outcome:
    """Sampled measures of T and S(j) in [T, 2T]."""
    from zml.partition.membership import PARTITION_COLUMNS, measure_partition
    from zml.partition.regime import RegimeOverrides, build_regime
    from zml.zeros.density import inject_synthetic

    p = cfg.parameters
    delta = p["delta"]
    if isinstance(delta, str):
        delta = [float(d) for d in delta.split(",")]
    overrides = RegimeOverrides(
        L=p["L"], threshold=p["threshold"], a_threshold_scale=float(p["a_scale"]),
        delta=tuple(delta) if delta else None,
    )
    T = float(p["T"])
    regime = build_regime(T, float(p["k"]), float(p["K"]), float(p["theta"]), overrides)
    table = _zero_table(cfg, 0.0, 2 * T + 100.0)
    synthetic = _parse_synthetic(p["synthetic"])
    if synthetic:
        table = inject_synthetic(table, synthetic)
    result = measure_partition(regime, table, int(p["samples"]), cfg.seed, cfg.workers,
                               p["phi"])
    out = _output(cfg, "partition.csv")
    write_csv(out, PARTITION_COLUMNS, result.rows())
    console.print(f"[bold blue]ZML[/] {result.summary()}")
    results = {e.bucket: e.estimate for e in result.estimates} | {
        "I_index": regime.I_index, "s0_bound": result.s0_bound}
    return Outcome(results, [out], result.report, result.report.passed)


# ── Random model ─────────────────────────────────────────────────────


@main.group()
def random():
    """Monte Carlo and exact evaluation in the random Euler-product model."""


def _random_options(fn):
    options = [
        click.option("--expr", default="abs-power", show_default=True,
                     type=click.Choice(["abs-power", "g-moment", "exp-sum"])),
        click.option("--primes-up-to", default=10, show_default=True,
                     help="abs-power: a(p) = p^{-1/2} for p up to this bound"),
        click.option("--k", "k", default=1.0, show_default=True),
        click.option("--ell", default=1, show_default=True),
        click.option("--n", "n", default=2, show_default=True, help="g-moment power"),
        click.option("--i", "i", default=1, show_default=True),
        click.option("--j", "j", default=1, show_default=True),
        click.option("--T", "T", default=1e6, show_default=True),
        click.option("--K", "K", default=1.0, show_default=True),
        click.option("--theta", default=0.0, show_default=True),
        click.option("--delta", default=None, help="Comma-separated delta ladder"),
        click.option("--threshold", default=None, type=float),
        click.option("--prime-cap", default=None, type=int),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _build_expr(p: dict):
    from zml.approx.primes import sieve_primes
    from zml.partition.regime import RegimeOverrides, build_regime
    from zml.random_model.montecarlo import AbsPower, ExpSumG, GMoment

    if p["expr"] == "abs-power":
        primes = sieve_primes(max(int(p["primes_up_to"]), 2)).primes.tolist()
        coeffs = {int(q): q**-0.5 for q in primes}
        return AbsPower(coeffs, int(p["k"]), int(p["ell"]))
    delta = p["delta"]
    if isinstance(delta, str):
        delta = [float(d) for d in delta.split(",")]
    overrides = RegimeOverrides(threshold=p["threshold"], delta=tuple(delta) if delta else None)
    regime = build_regime(float(p["T"]), float(p["k"]), float(p["K"]), float(p["theta"]),
                          overrides)
    if p["expr"] == "g-moment":
        return GMoment(regime, int(p["i"]), int(p["j"]), int(p["n"]), p["prime_cap"])
    return ExpSumG(regime, float(p["k"]), prime_cap=p["prime_cap"])


@zml_command(random, "mc", "random mc")
@_random_options
@click.option("--trials", default=100_000, show_default=True)
@click.option("--with-exact/--no-exact", default=True, help="Also evaluate the exact value")
def random_mc(cfg: RunConfig) -> Outcome:
    """Monte Carlo estimate with standard error."""
    from zml.random_model.montecarlo import REPORT_COLUMNS, mc_estimate

    p = cfg.parameters
    expr = _build_expr(p)
    with_exact = bool(p["with_exact"]) and getattr(expr, "exact_feasible", True)
    est = mc_estimate(expr, int(p["trials"]), cfg.seed, cfg.workers, with_exact=with_exact)
    out = _output(cfg, "random-mc.csv")
    write_csv(out, REPORT_COLUMNS, [est.as_row()])
    console.print(f"[bold blue]ZML[/] {est.summary()}")
    return Outcome(est.to_dict(), [out], passed=est.agrees())


@zml_command(random, "exact", "random exact")
@_random_options
def random_exact(cfg: RunConfig) -> Outcome:
    """Exact expectation (or circle-quadrature reference for exp-sum)."""
    from zml.random_model.montecarlo import REPORT_COLUMNS

    expr = _build_expr(cfg.parameters)
    value = expr.exact_value()
    out = _output(cfg, "random-exact.csv")
    write_csv(out, REPORT_COLUMNS, [(expr.expr_id, None, None, value, expr.bound())])
    results = {"expr_id": expr.expr_id, "exact_value": value, "bound": expr.bound()}
    _results_table("Exact expectation", results)
    return Outcome(results, [out])


@zml_command(random, "bound-check", "random bound-check")
@click.option("--specs", default=50, show_default=True)
@click.option("--trials", default=20_000, show_default=True)
def random_bound_check(cfg: RunConfig) -> Outcome:
    """Randomized check of E|sum a X^ell|^{2k} <= k! (sum |a|^2)^k and exact/MC agreement."""
    from zml.random_model.montecarlo import SUITE_COLUMNS, moment_bound_suite

    p = cfg.parameters
    report, rows = moment_bound_suite(int(p["specs"]), cfg.seed, int(p["trials"]), cfg.workers)
    out = _output(cfg, "bound-check.csv")
    write_csv(out, SUITE_COLUMNS, rows)
    return Outcome(dict(report.measurements), [out], report, report.passed)


# ── History ──────────────────────────────────────────────────────────


@zml_command(main, "history")
@click.option("--filter", "command_filter", default=None, help="Only this command")
def history(cfg: RunConfig) -> Outcome:
    """List recorded runs."""
    manifests = ManifestStore(cfg.cache_dir).get_history(cfg.parameters["command_filter"])
    table = Table(title=f"Run history ({len(manifests)})")
    for column in ("created_at", "command", "exit", "wall s", "outputs"):
        table.add_column(column)
    for m in manifests:
        table.add_row(m.created_at, m.command, str(m.exit_code), f"{m.wall_time_s:.2f}",
                      ", ".join(m.outputs))
    console.print(table)
    out = _output(cfg, "history.csv")
    write_csv(out, ("created_at", "command", "exit_code", "wall_time_s"),
              ((m.created_at, m.command, m.exit_code, m.wall_time_s) for m in manifests))
    return Outcome({"runs": len(manifests)}, [out])


if __name__ == "__main__":
    main()

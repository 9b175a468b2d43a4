import logging
from pathlib import Path
from typing import Any, Optional

import mpmath
import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from agt import BlockParams, crosscheck_block, verma_block_series
from config import DEFAULT_DIGITS, DEFAULT_THREADS, SAMPLES_DIR, SECTION_FOR_COMMAND, RunConfig, load_params
from errors import BlocksError, ConfigError
from painleve.blocks import irregular_block_series
from painleve.sigma_forms import form_for, sigma_ode_residual
from painleve.tau import TauSpec, default_point, tau_series
from reports import ReportWriter, series_table
from scalars import RATIONAL
from vertexops.degeneration import DegenerationSpec, degeneration_report
from vertexops.irregular import irregular_vo_coeffs
from vertexops.regular import regular_vo_coeffs

console = Console()
app = typer.Typer(help="Irregular vertex operators, their degenerations and Painlevé τ-series.")

report_writer = ReportWriter(console=console)

DEFAULT_ORDER = 4


# --- shared options ---

ParamsOpt = typer.Option(None, "--params", "-p", help="JSON parameter file (defaults to the shipped sample).")
OutputOpt = typer.Option(None, "--output", "-o", help="Write the JSON report here instead of stdout.")
CsvOpt = typer.Option(None, "--csv", help="Also write the coefficient table as CSV.")
ThreadsOpt = typer.Option(DEFAULT_THREADS, "--threads", "-j", min=1, help="Worker threads.")
DigitsOpt = typer.Option(DEFAULT_DIGITS, "--digits", min=DEFAULT_DIGITS, help="Working precision for floats.")
SeedOpt = typer.Option(0, "--seed", help="Seed recorded in the report.")
VerboseOpt = typer.Option(False, "--verbose", "-v", help="Debug logging.")


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def make_config(command: str, params: Optional[Path], output, csv, threads, digits, seed, verbose, **overrides) -> RunConfig:
    setup_logging(verbose)
    path = params or SAMPLES_DIR / f"{SECTION_FOR_COMMAND[command]}.json"
    cfg = RunConfig(
        command=command,
        params_path=path,
        output=output,
        digits=digits,
        seed=seed,
        threads=threads,
        csv=csv,
        verbose=verbose,
        overrides=overrides,
    )
    cfg.params = load_params(path)
    section = SECTION_FOR_COMMAND[command]
    if section not in cfg.params:
        raise ConfigError(f"parameter file has no {section!r} section", key=section)
    cfg.orders = {k: v for k, v in cfg.section().items() if k in ("order", "K", "n_max")}
    return cfg


def fail(err: BlocksError) -> None:
    console.print(f"[bold red]Error:[/bold red] {escape(str(err))}")
    raise typer.Exit(code=err.exit_code)


def parse_point(text: Optional[str]) -> Optional[str]:
    """``s=20``, ``t=1/20`` or a bare value."""
    if text is None:
        return None
    return text.split("=", 1)[1].strip() if "=" in text else text.strip()


@app.command(name="blocks-regular", help="Four-point c = 1 block from the Verma-module vertex operators.")
def blocks_regular(
    params: Optional[Path] = ParamsOpt,
    output: Optional[Path] = OutputOpt,
    csv: Optional[Path] = CsvOpt,
    order: Optional[int] = typer.Option(None, "--order", "-N", min=0, help="Block order."),
    threads: int = ThreadsOpt,
    digits: int = DigitsOpt,
    seed: int = SeedOpt,
    verbose: bool = VerboseOpt,
) -> None:
    try:
        cfg = make_config("blocks-regular", params, output, csv, threads, digits, seed, verbose, order=order)
        section = cfg.section()
        p = BlockParams.from_dict(section)
        series = verma_block_series(p, section.get("order", DEFAULT_ORDER), threads=threads)
        result = {"params": p.to_json(), "series": series.to_json()}
        report_writer.write(cfg, result, series_table({"coefficient": result["series"]["coeffs"]}))
    except BlocksError as err:
        fail(err)
    report_writer.done(f"Block solved to order {series.order}.", title="blocks-regular")


@app.command(name="blocks-irregular", help="Irregular blocks at s = ∞ and the three/two-point degenerate blocks.")
def blocks_irregular(
    params: Optional[Path] = ParamsOpt,
    output: Optional[Path] = OutputOpt,
    csv: Optional[Path] = CsvOpt,
    kind: Optional[str] = typer.Option(None, "--kind", help="V_at_infty, IV_at_infty, three_point_rank1 or two_point_prelimit."),
    order: Optional[int] = typer.Option(None, "--order", "-N", min=0, help="Block order."),
    threads: int = ThreadsOpt,
    digits: int = DigitsOpt,
    seed: int = SeedOpt,
    verbose: bool = VerboseOpt,
) -> None:
    try:
        cfg = make_config("blocks-irregular", params, output, csv, threads, digits, seed, verbose, kind=kind, order=order)
        section = cfg.section()
        series = irregular_block_series(
            section["kind"], section, section.get("n", 0), section.get("order", DEFAULT_ORDER)
        )
        result = {"kind": section["kind"], "series": series.to_json()}
        report_writer.write(cfg, result, series_table({"coefficient": result["series"]["coeffs"]}))
    except ValueError as err:
        fail(ConfigError(str(err), key="kind"))
    except BlocksError as err:
        fail(err)
    report_writer.done(f"{section['kind']} block solved to order {series.order}.", title="blocks-irregular")


@app.command(name="vo-solve", help="Solve a regular or irregular vertex operator order by order.")
def vo_solve(
    params: Optional[Path] = ParamsOpt,
    output: Optional[Path] = OutputOpt,
    csv: Optional[Path] = CsvOpt,
    order: Optional[int] = typer.Option(None, "--order", "-N", min=0, help="Highest order solved."),
    threads: int = ThreadsOpt,
    digits: int = DigitsOpt,
    seed: int = SeedOpt,
    verbose: bool = VerboseOpt,
) -> None:
    try:
        cfg = make_config("vo-solve", params, output, csv, threads, digits, seed, verbose, order=order)
        s = cfg.section()
        N = s.get("order", DEFAULT_ORDER)
        if s["kind"] == "regular":
            for key in ("delta_1", "delta_2", "delta_3"):
                if key not in s:
                    raise ConfigError("missing for a regular operator", key=key)
            vo = regular_vo_coeffs(s["delta_1"], s["delta_2"], s["delta_3"], s["c"], N, threads=threads)
        else:
            for key in ("rank", "Lambda", "beta_r", "delta"):
                if key not in s:
                    raise ConfigError("missing for an irregular operator", key=key)
            vo = irregular_vo_coeffs(s["rank"], s["Lambda"], s["beta_r"], s["delta"], s["c"], N)
        result = vo.to_json()
        table = series_table({"terms": [len(v.terms) for v in vo.coeffs]})
        report_writer.write(cfg, result, table)
    except BlocksError as err:
        fail(err)
    report_writer.done(f"{s['kind']} vertex operator solved to order {vo.order}.", title="vo-solve")


@app.command(name="degenerate", help="Check that a rearranged composition degenerates to the higher-rank operator.")
def degenerate(
    params: Optional[Path] = ParamsOpt,
    output: Optional[Path] = OutputOpt,
    csv: Optional[Path] = CsvOpt,
    scheme: Optional[str] = typer.Option(None, "--scheme", help="rank0to1, rank1to2 or rank2to3."),
    k: Optional[int] = typer.Option(None, "--k", "-K", min=0, help="Highest order R_k checked."),
    threads: int = ThreadsOpt,
    digits: int = DigitsOpt,
    seed: int = SeedOpt,
    verbose: bool = VerboseOpt,
) -> None:
    try:
        cfg = make_config("degenerate", params, output, csv, threads, digits, seed, verbose, scheme=scheme, K=k)
        s = cfg.section()
        spec = DegenerationSpec(
            s["scheme"], s["c"], s["beta"], s["delta_w"], s["rho"], s.get("K"), s.get("level_cap"), s.get("A_shift", 0)
        )
        report = degeneration_report(spec, threads)
        rows = [(o.k, o.verdict) for o in report.orders]
        report_writer.verdicts(f"{spec.scheme}: R_k limits", rows)
        table = series_table(
            {"valuation": [o.valuation for o in report.orders], "verdict": [o.verdict for o in report.orders]}
        )
        report_writer.write(cfg, report.to_json(), table)
    except ValueError as err:
        fail(ConfigError(str(err), key="scheme"))
    except BlocksError as err:
        fail(err)
    if report.verdict != "match":
        console.print(f"[bold red]Error:[/bold red] prefactor limits differ: {escape(str(report.prefactor))}")
        raise typer.Exit(code=2)
    report_writer.done(f"All {len(report.orders)} orders degenerate to the target.", title="degenerate")


@app.command(name="agt-crosscheck", help="Compare the Young-diagram block with the two Verma-module constructions.")
def agt_crosscheck(
    params: Optional[Path] = ParamsOpt,
    output: Optional[Path] = OutputOpt,
    csv: Optional[Path] = CsvOpt,
    order: Optional[int] = typer.Option(None, "--order", "-N", min=0, help="Block order."),
    delta_shift: str = typer.Option("0", "--delta-shift", help="Shift of the intermediate weight on the Verma side."),
    threads: int = ThreadsOpt,
    digits: int = DigitsOpt,
    seed: int = SeedOpt,
    verbose: bool = VerboseOpt,
) -> None:
    try:
        cfg = make_config("agt-crosscheck", params, output, csv, threads, digits, seed, verbose, order=order)
        section = cfg.section()
        p = BlockParams.from_dict(section)
        report = crosscheck_block(p, section.get("order", DEFAULT_ORDER), threads, RATIONAL(delta_shift))
        result = report.to_json()
        report_writer.verdicts("AGT cross-check", [(k, "match") for k in range(report.order + 1)])
        table = series_table({"agt": result["agt"], "verma": result["verma"], "descendant": result["descendant"]})
        report_writer.write(cfg, result, table)
    except BlocksError as err:
        fail(err)
    report_writer.done(f"Three constructions agree to order {report.order}.", title="agt-crosscheck")


def _tau_run(
    command: str, params, output, csv, kind, nmax, order, point, form, force, threads, digits, seed, verbose
) -> tuple[RunConfig, dict[str, Any], Any]:
    cfg = make_config(
        command, params, output, csv, threads, digits, seed, verbose,
        kind=kind, n_max=nmax, order=order, eval=parse_point(point), form=form, force=force or None,
    )
    section = cfg.section()
    spec = TauSpec.from_dict({**section, "digits": digits})
    tau = tau_series(spec, threads)
    t0 = section.get("eval") or default_point(spec.kind)
    value = tau.evaluate(t0)
    residual = sigma_ode_residual(form_for(tau, section.get("form", "")), tau, t0, digits)
    result = {
        "tau": tau.to_json(),
        "evaluation": value.to_json(),
        "residual": residual.to_json(),
    }
    modes = [m.to_json() for m in tau.modes]
    table = series_table(
        {
            "n": [m["n"] for m in modes],
            "weight": [m["weight"] for m in modes],
            "exponent": [m["exponent"] for m in modes],
        }
    )
    report_writer.write(cfg, result, table)
    return cfg, result, residual


KindOpt = typer.Option(None, "--kind", help="VI_at_0, VI_at_infty, V_at_infty or IV_at_infty.")
NmaxOpt = typer.Option(None, "--nmax", min=0, help="Fourier modes |n| <= nmax.")
OrderOpt = typer.Option(None, "--order", "-N", min=1, help="Block order per mode.")
EvalOpt = typer.Option(None, "--eval", help="Evaluation point, e.g. s=20 or t=1/20.")
FormOpt = typer.Option(None, "--form", help="σ-form to check (defaults per kind).")
ForceOpt = typer.Option(False, "--force", help="Evaluate past the smallest term of an asymptotic series.")


@app.command(name="tau", help="Assemble a τ-series, evaluate it and report the σ-form residual.")
def tau(
    params: Optional[Path] = ParamsOpt,
    output: Optional[Path] = OutputOpt,
    csv: Optional[Path] = CsvOpt,
    kind: Optional[str] = KindOpt,
    nmax: Optional[int] = NmaxOpt,
    order: Optional[int] = OrderOpt,
    point: Optional[str] = EvalOpt,
    form: Optional[str] = FormOpt,
    force: bool = ForceOpt,
    threads: int = ThreadsOpt,
    digits: int = DigitsOpt,
    seed: int = SeedOpt,
    verbose: bool = VerboseOpt,
) -> None:
    try:
        _, _, residual = _tau_run(
            "tau", params, output, csv, kind, nmax, order, point, form, force, threads, digits, seed, verbose
        )
    except BlocksError as err:
        fail(err)
    report_writer.done(
        f"{residual.form} residual {mpmath.nstr(abs(residual.value), 6)} (bound {mpmath.nstr(residual.bound, 6)})", title="tau"
    )


@app.command(name="residual", help="Like tau, but fail with exit code 2 when the residual exceeds its bound.")
def residual(
    params: Optional[Path] = ParamsOpt,
    output: Optional[Path] = OutputOpt,
    csv: Optional[Path] = CsvOpt,
    kind: Optional[str] = KindOpt,
    nmax: Optional[int] = NmaxOpt,
    order: Optional[int] = OrderOpt,
    point: Optional[str] = EvalOpt,
    form: Optional[str] = FormOpt,
    force: bool = ForceOpt,
    threads: int = ThreadsOpt,
    digits: int = DigitsOpt,
    seed: int = SeedOpt,
    verbose: bool = VerboseOpt,
) -> None:
    try:
        _, _, res = _tau_run(
            "residual", params, output, csv, kind, nmax, order, point, form, force, threads, digits, seed, verbose
        )
        res.check()
    except BlocksError as err:
        fail(err)
    report_writer.done(f"{res.form} residual within {res.budget}× the truncation bound.", title="residual")


if __name__ == "__main__":
    app()

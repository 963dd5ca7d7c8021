import logging
from pathlib import Path
from typing import List, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from modules.certify import (
    InstanceError,
    SosInstance,
    Stage2Result,
    Verdict,
    decide_t_squares,
    first_mismatch,
    stage1_pin_summands,
    verify_instance,
)
from modules.config import OutputFormat, RunConfig, Subcommand, parse_squares
from modules.groebner import Budget
from modules.instances import builtin_text
from modules.parser import PolynomialSyntaxError
from modules.polyring import MonomialOrder, OrderKind
from modules.report import CertificateReport, build_report, render_text, to_json

logger = logging.getLogger("sos_certify")

EXIT_OK = 0
EXIT_IDENTITY = 1
EXIT_PARSE = 2
EXIT_INCONCLUSIVE = 3
EXIT_BUDGET = 4

app = typer.Typer(add_completion=False, help="Exact certificates for sums-of-squares decompositions.")
err = Console(stderr=True)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        handlers=[RichHandler(console=err, show_path=False)],
        force=True,
    )


def load_instance(cfg: RunConfig) -> SosInstance:
    if cfg.builtin is not None:
        return SosInstance.from_text(cfg.builtin, builtin_text(cfg.builtin))
    try:
        text = cfg.file.read_text(encoding="utf-8")
    except OSError as e:
        raise PolynomialSyntaxError(f"cannot read {cfg.file}: {e.strerror}") from e
    return SosInstance.from_text(cfg.file.stem, text)


def emit(report: CertificateReport, cfg: RunConfig) -> None:
    body = to_json(report) if cfg.format is OutputFormat.JSON else render_text(report)
    if cfg.out is not None:
        cfg.out.write_text(body, encoding="utf-8")
    else:
        typer.echo(body, nl=False)


def _check(inst: SosInstance) -> tuple[bool, Optional[str]]:
    if verify_instance(inst):
        return True, None
    mismatch = first_mismatch(inst)
    if mismatch is None:
        return False, "generators are linearly dependent"
    m, expected, actual = mismatch
    return False, f"coefficient of {inst.context.monomial_name(m)}: g has {expected}, sum of squares has {actual}"


def _load(cfg: RunConfig) -> Optional[SosInstance]:
    try:
        inst = load_instance(cfg)
        logger.info("loaded %s: %d variables, %d generators", inst.name, inst.context.n, inst.s)
        return inst
    except PolynomialSyntaxError as e:
        err.print(f"parse error: {e}", markup=False, highlight=False)
    except InstanceError as e:
        err.print(f"invalid instance: {e}", markup=False, highlight=False)
    return None


def cmd_verify(cfg: RunConfig) -> int:
    inst = _load(cfg)
    if inst is None:
        return EXIT_PARSE
    valid, mismatch = _check(inst)
    emit(build_report(inst, valid, mismatch, timings=cfg.timings), cfg)
    return EXIT_OK if valid else EXIT_IDENTITY


def cmd_dual(cfg: RunConfig) -> int:
    inst = _load(cfg)
    if inst is None:
        return EXIT_PARSE
    valid, mismatch = _check(inst)
    if not valid:
        emit(build_report(inst, valid, mismatch, timings=cfg.timings), cfg)
        return EXIT_IDENTITY
    stage1 = stage1_pin_summands(inst, MonomialOrder(cfg.order, inst.context))
    emit(build_report(inst, valid, stage1=stage1, timings=cfg.timings), cfg)
    return EXIT_OK if stage1.verdict is Verdict.PINNED else EXIT_INCONCLUSIVE


def cmd_certify(cfg: RunConfig) -> int:
    inst = _load(cfg)
    if inst is None:
        return EXIT_PARSE
    valid, mismatch = _check(inst)
    if not valid:
        emit(build_report(inst, valid, mismatch, timings=cfg.timings), cfg)
        return EXIT_IDENTITY
    stage1 = stage1_pin_summands(inst, MonomialOrder(cfg.order, inst.context))
    results: List[Stage2Result] = [
        decide_t_squares(inst, t, stage1, cfg.order, cfg.budget) for t in cfg.squares
    ]
    emit(build_report(inst, valid, stage1=stage1, stage2=results, timings=cfg.timings), cfg)
    verdicts = {r.verdict for r in results}
    if Verdict.BUDGET_EXHAUSTED in verdicts:
        return EXIT_BUDGET
    if Verdict.INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _config(subcommand: Subcommand, **options) -> RunConfig:
    try:
        return RunConfig(subcommand=subcommand, **options)
    except ValidationError as e:
        messages = "; ".join(error["msg"] for error in e.errors())
        err.print(f"invalid options: {messages}", markup=False, highlight=False)
        raise typer.Exit(EXIT_PARSE) from e


BuiltinOption = typer.Option(None, "--builtin", help="example-2.1 or example-2.2")
FileOption = typer.Option(None, "--file", help="instance file")
FormatOption = typer.Option(OutputFormat.TEXT, "--format")
OutOption = typer.Option(None, "--out", help="write the report here instead of stdout")
TimingsOption = typer.Option(True, "--timings/--no-timings", help="include wall-clock seconds")
OrderOption = typer.Option(OrderKind.DEGREVLEX, "--order")


@app.callback()
def main(log_level: str = typer.Option("WARNING", "--log-level", help="logging level for stderr")):
    configure_logging(log_level)


@app.command()
def verify(
    builtin: Optional[str] = BuiltinOption,
    file: Optional[Path] = FileOption,
    format: OutputFormat = FormatOption,
    out: Optional[Path] = OutOption,
    timings: bool = TimingsOption,
):
    """Check g = p1^2 + ... + ps^2 and the independence of the p_i."""
    cfg = _config(Subcommand.VERIFY, builtin=builtin, file=file, format=format, out=out, timings=timings)
    raise typer.Exit(cmd_verify(cfg))


@app.command()
def dual(
    builtin: Optional[str] = BuiltinOption,
    file: Optional[Path] = FileOption,
    order: OrderKind = OrderOption,
    format: OutputFormat = FormatOption,
    out: Optional[Path] = OutOption,
    timings: bool = TimingsOption,
):
    """Compute the dual obstruction space and pin SOS summands to span(p_i)."""
    cfg = _config(
        Subcommand.DUAL, builtin=builtin, file=file, order=order, format=format, out=out, timings=timings
    )
    raise typer.Exit(cmd_dual(cfg))


@app.command()
def certify(
    builtin: Optional[str] = BuiltinOption,
    file: Optional[Path] = FileOption,
    squares: str = typer.Option(..., "--squares", help="t or t1..t2"),
    order: OrderKind = OrderOption,
    max_pairs: int = typer.Option(Budget().max_pairs, "--max-pairs"),
    max_coeff_bits: int = typer.Option(Budget().max_coeff_bits, "--max-coeff-bits"),
    format: OutputFormat = FormatOption,
    out: Optional[Path] = OutOption,
    timings: bool = TimingsOption,
):
    """Decide, for each t, whether g is a sum of t squares."""
    try:
        counts = parse_squares(squares)
    except ValueError as e:
        raise typer.BadParameter(str(e), param_hint="--squares") from e
    try:
        budget = Budget(max_pairs=max_pairs, max_coeff_bits=max_coeff_bits)
    except ValidationError as e:
        raise typer.BadParameter("budgets must be positive") from e
    cfg = _config(
        Subcommand.CERTIFY,
        builtin=builtin,
        file=file,
        squares=counts,
        order=order,
        budget=budget,
        format=format,
        out=out,
        timings=timings,
    )
    raise typer.Exit(cmd_certify(cfg))


if __name__ == "__main__":
    app()

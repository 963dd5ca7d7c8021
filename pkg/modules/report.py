"""Certificate reports: pydantic models, JSON output and a plain-text rendering."""

from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from modules.certify import SosInstance, Stage1Result, Stage2Result, Verdict
from modules.gram import MomentMatrix, split_basis
from modules.parser import print_polynomial

SPECTRAHEDRON_NOTE = (
    "The generators' Gram matrix is a point of rank {rank} and no decomposition with {t} squares exists; "
    "by convexity the Gram spectrahedron of g is a single point, so the decomposition is unique up to "
    "orthogonal equivalence (prose-level argument, not machine-checked)."
)


class MatrixReport(BaseModel):
    basis: List[str]
    entries: List[List[str]]

    @classmethod
    def of(cls, Q: MomentMatrix) -> "MatrixReport":
        return cls(**Q.to_json())


class Stage1Report(BaseModel):
    model_config = ConfigDict(use_enum_values=True)

    space_dimension: int
    space_basis: List[MatrixReport]
    display_basis: List[str]
    psd_parameters: Optional[List[str]] = None
    psd_element: Optional[MatrixReport] = None
    kernel_dimension: Optional[int] = None
    kernel_basis: List[List[str]] = []
    span_matches: bool
    annihilates_products: bool
    vanishes_on_g: bool
    gram_rank: int
    verdict: Verdict
    elapsed_seconds: Optional[float] = None


class Stage2Report(BaseModel):
    model_config = ConfigDict(use_enum_values=True)

    squares: int
    unknowns: int
    generators: int
    order: str
    variable_order: List[str]
    verdict: Verdict
    groebner_basis: Optional[List[str]] = None
    pairs_processed: Optional[int] = None
    pairs_pruned: Optional[int] = None
    witness: Optional[Dict[str, str]] = None
    ansatz: List[str] = []
    note: str = ""
    elapsed_seconds: Optional[float] = None


class CertificateReport(BaseModel):
    model_config = ConfigDict(use_enum_values=True)

    instance: str
    variables: List[str]
    s: int
    g: str
    generators: List[str]
    valid: bool
    mismatch: Optional[str] = None
    stage1: Optional[Stage1Report] = None
    stage2: List[Stage2Report] = []
    notes: List[str] = []


def stage1_report(result: Stage1Result, timings: bool = True) -> Stage1Report:
    basis = result.space.basis
    psd = result.psd_element
    return Stage1Report(
        space_dimension=result.space.dimension,
        space_basis=[MatrixReport.of(Q) for Q in result.space.matrices],
        display_basis=split_basis(basis.context, basis.degree).names(),
        psd_parameters=[str(c) for c in psd.parameters] if psd is not None and psd.parameters else None,
        psd_element=MatrixReport.of(psd) if psd is not None else None,
        kernel_dimension=result.kernel.dimension if result.kernel is not None else None,
        kernel_basis=[[str(c) for c in v] for v in result.kernel.vectors] if result.kernel is not None else [],
        span_matches=result.span_matches,
        annihilates_products=result.annihilates_products,
        vanishes_on_g=result.vanishes_on_g,
        gram_rank=result.gram_rank,
        verdict=result.verdict,
        elapsed_seconds=round(result.elapsed, 6) if timings else None,
    )


def stage2_report(result: Stage2Result, timings: bool = True) -> Stage2Report:
    basis = result.basis
    return Stage2Report(
        squares=result.t,
        unknowns=result.unknowns,
        generators=result.generators,
        order=result.order.kind.value,
        variable_order=list(result.variable_order),
        verdict=result.verdict,
        groebner_basis=[print_polynomial(p, result.order) for p in basis.elements] if basis is not None else None,
        pairs_processed=basis.pairs_processed if basis is not None else None,
        pairs_pruned=basis.pairs_pruned if basis is not None else None,
        witness={k: str(v) for k, v in result.witness.items()} if result.witness is not None else None,
        ansatz=[print_polynomial(f) for f in result.rows],
        note=result.note,
        elapsed_seconds=round(result.elapsed, 6) if timings else None,
    )


def build_report(
    inst: SosInstance,
    valid: bool,
    mismatch: Optional[str] = None,
    stage1: Optional[Stage1Result] = None,
    stage2: Optional[List[Stage2Result]] = None,
    timings: bool = True,
) -> CertificateReport:
    notes = []
    stage2 = stage2 or []
    if stage1 is not None and stage1.verdict is Verdict.PINNED:
        notes.append(f"every SOS summand of g lies in span(p1..p{inst.s})")
        for r in stage2:
            if r.verdict is Verdict.INFEASIBLE and r.t == stage1.gram_rank - 1:
                notes.append(SPECTRAHEDRON_NOTE.format(rank=stage1.gram_rank, t=r.t))
        if stage1.psd_element is not None and stage1.psd_element.parameters:
            notes.append(
                "moment matrix chosen at parameters ("
                + ", ".join(str(c) for c in stage1.psd_element.parameters)
                + "); this choice is a search result, not a canonical normalisation"
            )
    return CertificateReport(
        instance=inst.name,
        variables=list(inst.context.variables),
        s=inst.s,
        g=print_polynomial(inst.g),
        generators=[print_polynomial(p) for p in inst.generators],
        valid=valid,
        mismatch=mismatch,
        stage1=stage1_report(stage1, timings) if stage1 is not None else None,
        stage2=[stage2_report(r, timings) for r in stage2],
        notes=notes,
    )


def to_json(report: CertificateReport) -> str:
    return report.model_dump_json(indent=2) + "\n"


def _matrix_lines(matrix: MatrixReport, order: List[str]) -> List[str]:
    position = {name: i for i, name in enumerate(matrix.basis)}
    perm = [position[name] for name in order]
    rows = [[matrix.entries[a][b] for b in perm] for a in perm]
    width = max((len(x) for row in rows for x in row), default=1)
    return [" ".join(x.rjust(width) for x in row) for row in rows]


def _nonzero_block(matrix: MatrixReport, order: List[str]) -> List[str]:
    """Names in ``order`` whose row is not identically zero."""
    position = {name: i for i, name in enumerate(matrix.basis)}
    return [name for name in order if any(x != "0" for x in matrix.entries[position[name]])]


def render_text(report: CertificateReport) -> str:
    lines = [
        f"instance: {report.instance}",
        f"variables: {', '.join(report.variables)}",
        f"s = {report.s}",
        f"g = {report.g}",
    ]
    lines += [f"p{i} = {p}" for i, p in enumerate(report.generators, start=1)]
    lines.append(f"valid: {'yes' if report.valid else 'no'}")
    if report.mismatch:
        lines.append(f"first mismatch: {report.mismatch}")

    st1 = report.stage1
    if st1 is not None:
        lines += ["", "stage 1: dual obstruction space", f"dim E = {st1.space_dimension}"]
        for k, matrix in enumerate(st1.space_basis, start=1):
            block = _nonzero_block(matrix, st1.display_basis)
            lines.append(f"basis matrix {k}, nonzero block on [{', '.join(block)}]:")
            lines += ["  " + row for row in _matrix_lines(matrix, block)]
        if st1.psd_parameters is not None:
            lines.append(f"PSD element at parameters ({', '.join(st1.psd_parameters)})")
        else:
            lines.append("no PSD element found")
        if st1.kernel_dimension is not None:
            lines.append(f"kernel dimension: {st1.kernel_dimension}")
            lines.append(f"kernel equals span of generators: {'yes' if st1.span_matches else 'no'}")
        lines.append(f"functionals vanish on g: {'yes' if st1.vanishes_on_g else 'no'}")
        lines.append(f"rank of the generators' Gram matrix: {st1.gram_rank}")
        lines.append(f"verdict: {st1.verdict}")
        if st1.elapsed_seconds is not None:
            lines.append(f"elapsed: {st1.elapsed_seconds:.3f}s")

    for st2 in report.stage2:
        lines += ["", f"stage 2: t = {st2.squares}"]
        lines.append(f"unknowns: {st2.unknowns}, equations: {st2.generators}, order: {st2.order}")
        lines += [f"  f{i} = {f}" for i, f in enumerate(st2.ansatz, start=1)]
        lines.append(f"verdict: {st2.verdict}")
        if st2.groebner_basis is not None:
            shown = st2.groebner_basis if len(st2.groebner_basis) <= 10 else st2.groebner_basis[:10] + ["..."]
            count = len(st2.groebner_basis)
            noun = "element" if count == 1 else "elements"
            lines.append(f"Groebner basis ({count} {noun}): {{{', '.join(shown)}}}")
        if st2.witness is not None:
            nonzero = {k: v for k, v in st2.witness.items() if v != "0"}
            lines.append("witness: " + ", ".join(f"{k}={v}" for k, v in nonzero.items()) + " (others 0)")
        if st2.note:
            lines.append(st2.note)
        if st2.elapsed_seconds is not None:
            lines.append(f"elapsed: {st2.elapsed_seconds:.3f}s")

    if report.notes:
        lines.append("")
        lines += [f"note: {n}" for n in report.notes]
    return "\n".join(lines) + "\n"

# services/exporter.py
"""
Export Service
Renders factor graphs (DOT), relation matrices (fixed-width text), assessments
(CSV) and human-readable reports. Every renderer is pure and byte-deterministic.
"""
import csv
import io
from collections import OrderedDict
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel

from config.settings import settings
from models.assessment import Assessment, ImpactScore, SuccessEstimate
from models.errors import CsvParseError, MatrixParseError, OrderMismatchError, ReportMismatchError
from models.graph import BoolMatrix, FactorGraph
from models.risk import RiskRegister

CSV_COLUMNS = (
    'rank',
    'risk_id',
    'type_weight',
    'probability_fraction',
    'frequency_weight',
    'impact',
    'residual_frequency_weight',
    'residual_impact',
)


# ============================================================================
# DOT
# ============================================================================

def _quote(text: str) -> str:
    return '"' + text.replace('\\', '\\\\').replace('"', '\\"') + '"'


def to_dot(graph: FactorGraph, highlight_closure: Optional[BoolMatrix] = None) -> str:
    """
    Graphviz digraph: one node per factor, a solid edge per influence and,
    when highlight_closure is given, a dashed edge per pair only the closure has.
    Nodes and edges are emitted in factor order.
    """
    if highlight_closure is not None and highlight_closure.order != graph.ids:
        raise OrderMismatchError(
            f"closure order {list(highlight_closure.order)} does not match graph order {list(graph.ids)}"
        )

    name = settings.DOT_GRAPH_NAME
    lines = [f"digraph {_quote(name)} {{" if name else "digraph {"]
    for factor in graph.factors:
        lines.append(f"  {_quote(factor.id)} [label={_quote(factor.name)}];")

    for source, target in graph.ordered_edges():
        lines.append(f"  {_quote(source)} -> {_quote(target)};")

    if highlight_closure is not None:
        for source, target in highlight_closure.pairs():
            if (source, target) not in graph.edges:
                lines.append(f"  {_quote(source)} -> {_quote(target)} [style=dashed];")

    lines.append("}")
    return "\n".join(lines) + "\n"


# ============================================================================
# MATRIX TEXT
# ============================================================================

class RenderedMatrix(BaseModel):
    """Header of factor ids plus labelled 0/1 rows"""
    header: Tuple[str, ...]
    rows: Tuple[Tuple[str, Tuple[str, ...]], ...]

    @property
    def label_width(self) -> int:
        return max((len(fid) for fid in self.header), default=0)

    def to_text(self) -> str:
        width = self.label_width
        lines = [" ".join((" " * width,) + self.header) if self.header else ""]
        for label, cells in self.rows:
            lines.append(" ".join((label.ljust(width),) + cells))
        return "\n".join(lines) + "\n"

    class Config:
        frozen = True


def rendered_matrix(m: BoolMatrix) -> RenderedMatrix:
    rows = tuple(
        (fid, tuple("1" if cell else "0" for cell in m.cells[i]))
        for i, fid in enumerate(m.order)
    )
    return RenderedMatrix(header=m.order, rows=rows)


def render_matrix(m: BoolMatrix) -> str:
    """
    Matrix as text: a header line of column ids, then one line per row id with
    space-separated 0/1 cells. Row labels are left-aligned to the widest id.
    """
    return rendered_matrix(m).to_text()


def parse_matrix(text: str) -> BoolMatrix:
    """Inverse of render_matrix"""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MatrixParseError("empty input: expected at least a header line")

    order = lines[0].split()
    if len(lines) - 1 != len(order):
        raise MatrixParseError(f"header names {len(order)} factors but {len(lines) - 1} rows follow")

    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        tokens = line.split()
        if not tokens or tokens[0] != order[lineno - 2]:
            raise MatrixParseError(f"line {lineno}: expected row '{order[lineno - 2]}'")
        cells = tokens[1:]
        if len(cells) != len(order) or any(c not in ("0", "1") for c in cells):
            raise MatrixParseError(f"line {lineno}: expected {len(order)} cells of 0/1")
        rows.append([c == "1" for c in cells])
    return BoolMatrix.from_rows(order, rows)


# ============================================================================
# CSV
# ============================================================================

def export_csv(assessments: Sequence[Assessment]) -> str:
    """Assessments as CSV with a header row, columns in CSV_COLUMNS order"""
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(CSV_COLUMNS)
    for a in assessments:
        residual = a.residual_impact
        writer.writerow([
            a.priority,
            a.risk_id,
            repr(a.impact.type_weight),
            repr(a.impact.probability_fraction),
            repr(a.impact.frequency_weight),
            repr(a.impact.value),
            repr(residual.frequency_weight) if residual else "",
            repr(residual.value) if residual else "",
        ])
    return buffer.getvalue()


def parse_csv(text: str) -> List[Assessment]:
    """Inverse of export_csv"""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError("empty CSV: header row missing")
    if tuple(header) != CSV_COLUMNS:
        raise CsvParseError(f"unexpected header {header}")

    assessments = []
    for lineno, row in enumerate(reader, 2):
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise CsvParseError(f"line {lineno}: expected {len(CSV_COLUMNS)} columns, got {len(row)}")
        record = dict(zip(CSV_COLUMNS, row))
        try:
            impact = ImpactScore(
                type_weight=float(record['type_weight']),
                probability_fraction=float(record['probability_fraction']),
                frequency_weight=float(record['frequency_weight']),
            )
            residual = None
            if record['residual_frequency_weight']:
                residual = impact.model_copy(
                    update={'frequency_weight': float(record['residual_frequency_weight'])}
                )
            assessments.append(Assessment(
                risk_id=record['risk_id'],
                impact=impact,
                residual_impact=residual,
                priority=int(record['rank']),
            ))
        except ValueError as e:
            raise CsvParseError(f"line {lineno}: {e}")
    return assessments


# ============================================================================
# REPORT
# ============================================================================

def report(
    register: RiskRegister,
    assessments: Sequence[Assessment],
    estimate: Optional[SuccessEstimate] = None,
) -> str:
    """Plain-text report: risks by priority, per-type summary, mitigations, success estimate"""
    by_id = {a.risk_id: a for a in assessments}
    if len(by_id) != len(assessments) or set(by_id) != set(register.ids):
        raise ReportMismatchError("assessments do not correspond 1:1 to register risks")

    width = settings.REPORT_WIDTH
    lines = ["=" * width, f"RISK ASSESSMENT REPORT: {register.project_name}", "=" * width]

    if not register.risks:
        lines.append("No risks in register.")
    else:
        lines.extend(_priority_table(register, assessments))
        lines.append("-" * width)
        lines.extend(_type_summary(register, by_id))
        mitigations = _mitigation_lines(register)
        if mitigations:
            lines.append("-" * width)
            lines.extend(mitigations)

    if estimate is not None:
        lines.append("-" * width)
        lines.extend(_estimate_lines(estimate))
    lines.append("=" * width)
    return "\n".join(lines) + "\n"


def _priority_table(register: RiskRegister, assessments: Sequence[Assessment]) -> List[str]:
    header = ("Rank", "ID", "Type", "Probability", "Frequency", "Impact", "Residual")
    rows = []
    for a in sorted(assessments, key=lambda a: a.priority):
        risk = register.get(a.risk_id)
        residual = f"{a.residual_impact.value:.4f}" if a.residual_impact else "-"
        if risk.mitigation_regressed:
            residual += " (!)"
        rows.append((
            str(a.priority),
            risk.id,
            risk.risk_type.name,
            str(risk.probability),
            risk.frequency.label,
            f"{a.impact.value:.4f}",
            residual,
        ))
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return [fmt.format(*header).rstrip()] + [fmt.format(*r).rstrip() for r in rows]


def _type_summary(register: RiskRegister, by_id) -> List[str]:
    totals: "OrderedDict[str, List[float]]" = OrderedDict()
    for risk in register.risks:
        totals.setdefault(risk.risk_type.name, []).append(by_id[risk.id].impact.value)
    name_width = max(len(name) for name in totals)
    lines = ["Risks by type:"]
    for name, impacts in totals.items():
        noun = "risk" if len(impacts) == 1 else "risks"
        lines.append(f"  {name:<{name_width}}  {len(impacts):>3} {noun:<5}  total impact {sum(impacts):.4f}")
    return lines


def _mitigation_lines(register: RiskRegister) -> List[str]:
    lines = []
    for risk in register.risks:
        plan = risk.mitigation
        if plan is None:
            continue
        change = f"{risk.frequency.label} -> {plan.post_frequency.label}"
        if risk.observed_rate and plan.post_rate:
            change += f" ({risk.observed_rate} -> {plan.post_rate})"
        flag = "  [frequency increases]" if risk.mitigation_regressed else ""
        lines.append(f"  {risk.id}: {plan.description} [{change}]{flag}")
    return ["Mitigations:"] + lines if lines else []


def _estimate_lines(estimate: SuccessEstimate) -> List[str]:
    basis = "residual impacts" if estimate.use_residual else "impacts"
    lines = [f"Project success estimate (independent risks, {basis}): {estimate.analytic:.6f}"]
    if estimate.sampled is not None:
        s = estimate.sampled
        lines.append(
            f"Monte Carlo: {s.mean:.6f} over {s.trials} trials (seed {s.seed}, {s.generator})"
        )
    return lines

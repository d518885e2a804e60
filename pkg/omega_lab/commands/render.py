"""
Report rendering for the command line.

Text output is for people, structured output is one JSON document per
line. Numbers are always exact: a dyadic fraction next to its binary
expansion, never a float.
"""

from typing import Callable, Iterable, List, TypeVar

import click
from pydantic import BaseModel

from omega_lab.models.bits import BitString, DyadicRational
from omega_lab.models.schema import (
    BerryOutcome, ComplexityBound, ExactOmega, Exhausted, Halted, KraftReport, MachineSummary, OracleVerdict,
    RunOutcome, StageReport,
)

Report = TypeVar("Report", bound=BaseModel)


def bits(value: BitString) -> str:
    return str(value) if value else "(empty)"


def dyadic(value: DyadicRational, digits: int = 0) -> str:
    return f"{value} = {value.to_binary(digits)}"


def emit(report: Report, output_format: str, render: Callable[[Report], Iterable[str]]) -> None:
    if output_format == "structured":
        click.echo(report.model_dump_json())
        return
    for line in render(report):
        click.echo(line)


def render_outcome(outcome: RunOutcome) -> List[str]:
    if isinstance(outcome, Halted):
        return [f"halted output={bits(outcome.output)} steps={outcome.steps} bits_consumed={outcome.bits_consumed}"]
    if isinstance(outcome, Exhausted):
        return [f"exhausted fuel={outcome.fuel}"]
    detail = f" ({outcome.detail})" if outcome.detail else ""
    return [f"invalid reason={outcome.reason.value}{detail}"]


def render_summary(summary: MachineSummary) -> List[str]:
    if summary.table is None:
        return [f"universal machine isa={summary.isa}", f"digest {summary.digest}"]
    table = summary.table
    return [
        f"table machine programs={table.program_count} longest={table.max_length} bits",
        f"kraft sum {dyadic(table.kraft_sum, table.max_length)}",
        f"digest {summary.digest}",
    ]


def render_kraft(report: KraftReport) -> List[str]:
    longest = max((entry.length for entry in report.contributions), default=0)
    lines = [f"{bits(entry.program):<{longest}}  {entry.weight}" for entry in report.contributions]
    lines.append(f"kraft sum {dyadic(report.kraft_sum, longest)}")
    lines.append("complete (sum = 1)" if report.complete else "incomplete (sum < 1)")
    return lines


def render_exact(report: ExactOmega) -> List[str]:
    return [f"{report.omega} = {report.omega_binary}"]


def render_stage(report: StageReport) -> List[str]:
    line = (
        f"stage {report.stage}: omega_lower {report.omega_lower} = {report.omega_binary} "
        f"new={len(report.newly_halted)} halted={report.cumulative_halted_count} "
        f"valid={report.valid_programs} invalid={report.invalid_strings} exhausted={report.exhausted}"
    )
    if report.agreeing_bits is not None:
        line += f" agreeing_bits={report.agreeing_bits}"
    return [f"{line} digest={report.state_digest[:16]}"]


def render_oracle(verdict: OracleVerdict) -> List[str]:
    size = verdict.max_length
    lines = [f"threshold {dyadic(verdict.threshold, size)}"]
    if verdict.resolved:
        lines.append(f"resolved at stage {verdict.stage}: omega_lower {dyadic(verdict.omega_lower, verdict.stage)}")
    else:
        lines.append(
            f"unresolved after stage {verdict.last_stage}: omega_lower {dyadic(verdict.omega_lower, verdict.last_stage)}"
        )
    lines.append("halts: " + (" ".join(str(p) for p in verdict.halting) or "none"))
    if verdict.undetermined:
        lines.append("undetermined: " + " ".join(str(p) for p in verdict.undetermined))
    lines.append(f"never_halts: every other string of length 1..{size}")
    return lines


def render_complexity(bound: ComplexityBound) -> List[str]:
    if bound.value is None:
        head = f"H({bits(bound.target)}) infinite within {bound.size_bound} bits ({bound.bound_kind.value})"
    else:
        head = (
            f"H({bits(bound.target)}) <= {bound.value} ({bound.bound_kind.value}) "
            f"witness={bound.witness} steps={bound.witness_steps}"
        )
    return [head, bound.explanation, f"irreducibility {bound.irreducibility.value}"]


def render_berry(outcome: BerryOutcome) -> List[str]:
    lines = [
        f"integer {outcome.integer_found}",
        f"produced {outcome.produced_set_size} integers from programs of at most {outcome.program_bound} bits",
    ]
    if outcome.decider is None:
        for entry in outcome.audit:
            lines.append(f"exhausted {entry.program}: if it halts later it may produce {outcome.integer_found}")
        return lines
    lines.append(f"decider {outcome.decider} queried on {len(outcome.audit)} programs")
    for entry in outcome.contradictions:
        lines.append(f"contradiction {entry.program}: claimed {entry.claimed.value}, observed {entry.observed}")
    if not outcome.contradictions:
        lines.append("no contradictions observed")
    return lines

"""
Machine commands: run a single program, validate a spec file, report Kraft sums.
"""

import logging
from pathlib import Path
from typing import Optional, Tuple

import click
from pydantic import TypeAdapter

from omega_lab.commands.options import BITSTRING, format_option, fuel_option, machine_option, resolve_fuel
from omega_lab.commands.render import emit, render_kraft, render_outcome, render_summary
from omega_lab.config import Settings
from omega_lab.dependencies import get_machine
from omega_lab.errors import UnsupportedOperationError
from omega_lab.models.bits import BitString
from omega_lab.models.schema import ExecConfig, RunOutcome
from omega_lab.services.coding import kraft_report, require_within_bound
from omega_lab.services.machine_service import TableMachine

logger = logging.getLogger(__name__)

_outcome_adapter: TypeAdapter = TypeAdapter(RunOutcome)


@click.command("run")
@machine_option
@click.option("--program", required=True, type=BITSTRING, help="Program bits.")
@fuel_option
@format_option
@click.pass_obj
def run_program(settings: Settings, machine_path: Path, program: BitString, fuel: Optional[int], output_format: str):
    """
    Run one program under a step budget.

    Prints the outcome: halted with output and step count, exhausted, or
    invalid with the decoder's reason.
    """
    require_within_bound(program, settings.MAX_BITS)
    machine = get_machine(machine_path, settings)
    outcome = machine.run(program, ExecConfig(fuel=resolve_fuel(fuel, settings)))
    if output_format == "structured":
        click.echo(_outcome_adapter.dump_json(outcome).decode("utf-8"))
    else:
        for line in render_outcome(outcome):
            click.echo(line)


@click.command("validate")
@machine_option
@format_option
@click.pass_obj
def validate(settings: Settings, machine_path: Path, output_format: str):
    """
    Validate a machine spec file.

    Table keys must be prefix-free; a Kraft sum of exactly 1 is accepted
    with a warning.
    """
    machine = get_machine(machine_path, settings)
    summary = machine.describe()
    logger.info(f"Machine validated - Path: {machine_path}, Type: {summary.type}, Digest: {summary.digest[:12]}")
    emit(summary, output_format, render_summary)
    if summary.table is not None and summary.table.boundary:
        click.echo("warning: Kraft sum is exactly 1, no program outside the table can ever halt", err=True)


@click.command("kraft")
@click.option(
    "--machine", "machine_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Table machine whose keys are summed.",
)
@click.argument("members", nargs=-1, type=BITSTRING)
@format_option
@click.pass_obj
def kraft(settings: Settings, machine_path: Optional[Path], members: Tuple[BitString, ...], output_format: str):
    """
    Exact Kraft sum of a prefix-free code.

    The code is the key set of a table machine (--machine) or the
    bitstrings given as arguments.
    """
    if (machine_path is None) == (not members):
        raise click.UsageError("Give either --machine or bitstrings, not both")
    if machine_path is not None:
        machine = get_machine(machine_path, settings)
        if not isinstance(machine, TableMachine):
            raise UnsupportedOperationError("kraft needs a table machine; a universal machine has infinitely many programs")
        members = machine.keys
    report = kraft_report(members, settings.MAX_BITS)
    emit(report, output_format, render_kraft)

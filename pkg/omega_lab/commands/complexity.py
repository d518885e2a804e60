"""
Program-size commands: complexity search and the Berry construction.
"""

from pathlib import Path
from typing import Optional

import click

from omega_lab.commands.options import BITSTRING, format_option, fuel_option, machine_option, resolve_fuel
from omega_lab.commands.render import emit, render_berry, render_complexity
from omega_lab.config import Settings
from omega_lab.dependencies import get_decider, get_machine, get_oracle_service
from omega_lab.models.bits import BitString


@click.command("complexity")
@machine_option
@click.option("--target", required=True, type=BITSTRING, help="Output to produce; may be empty.")
@click.option("--max-size", required=True, type=click.IntRange(min=1), help="Largest program size searched, in bits.")
@fuel_option
@format_option
@click.pass_obj
def complexity(
    settings: Settings,
    machine_path: Path,
    target: BitString,
    max_size: int,
    fuel: Optional[int],
    output_format: str,
):
    """
    Upper bound on the size of the smallest program producing --target.

    The bound is exact when no smaller program ran out of fuel.
    """
    machine = get_machine(machine_path, settings)
    bound = get_oracle_service(machine, settings).complexity_upper(target, max_size, resolve_fuel(fuel, settings))
    emit(bound, output_format, render_complexity)


@click.command("berry")
@machine_option
@click.option("--decider", default=None, help="Verdict file, or a command speaking HALTS?/YES/NO on stdin/stdout.")
@click.option("--n", "size", type=click.IntRange(min=1), default=None, help="Size parameter N.")
@click.option("--multiplier", type=click.IntRange(min=1), default=None, help="Programs up to multiplier * N bits are queried.")
@click.option("--max-size", type=click.IntRange(min=1), default=None, help="Size bound M when no decider is given.")
@fuel_option
@format_option
@click.pass_obj
def berry(
    settings: Settings,
    machine_path: Path,
    decider: Optional[str],
    size: Optional[int],
    multiplier: Optional[int],
    max_size: Optional[int],
    fuel: Optional[int],
    output_format: str,
):
    """
    Least positive integer not produced by any program up to a size bound.

    Without --decider, every program of at most --max-size bits is run
    under the step budget. With --decider, the Berry program's logic runs
    against the claimed halting decider and every claim contradicted by
    execution is reported.
    """
    machine = get_machine(machine_path, settings)
    service = get_oracle_service(machine, settings)
    fuel = resolve_fuel(fuel, settings)

    if decider is None:
        if max_size is None:
            raise click.UsageError("berry needs --max-size, or --decider with --n")
        outcome = service.first_complex_integer(max_size, fuel)
    else:
        if size is None:
            raise click.UsageError("berry --decider needs --n")
        with get_decider(decider) as claimed:
            outcome = service.berry_demo(claimed, size, fuel, multiplier)

    emit(outcome, output_format, render_berry)
    if outcome.contradictions:
        click.echo(f"warning: {len(outcome.contradictions)} decider claims contradicted by execution", err=True)

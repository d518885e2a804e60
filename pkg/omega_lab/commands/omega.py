"""
Omega commands: the exact halting probability of a table machine, staged
lower bounds, and halting verdicts from a prefix of Omega.
"""

from pathlib import Path
from typing import Optional

import click

from omega_lab.commands.options import BITSTRING, format_option, machine_option
from omega_lab.commands.render import emit, render_exact, render_oracle, render_stage
from omega_lab.config import Settings
from omega_lab.dependencies import get_enumeration_service, get_machine, get_oracle_service
from omega_lab.models.bits import BitString
from omega_lab.models.schema import ExactOmega


@click.command("omega-exact")
@machine_option
@format_option
@click.pass_obj
def omega_exact(settings: Settings, machine_path: Path, output_format: str):
    """
    Exact Omega of a table machine, as a dyadic fraction and in binary.
    """
    machine = get_machine(machine_path, settings)
    omega = get_enumeration_service(machine, settings).exact_omega()
    validation = machine.validation
    emit(ExactOmega(omega=omega, digits=validation.max_length, boundary=validation.boundary), output_format, render_exact)
    if validation.boundary:
        click.echo("warning: Omega = 1, every program of this machine is in its table", err=True)


@click.command("omega-stages")
@machine_option
@click.option("--stages", required=True, type=click.IntRange(min=1), help="Last stage K to run.")
@click.option(
    "--checkpoint",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Checkpoint file to resume from and rewrite after every stage.",
)
@format_option
@click.pass_obj
def omega_stages(settings: Settings, machine_path: Path, stages: int, checkpoint: Optional[Path], output_format: str):
    """
    Stream lower bounds Omega_K for K = 1 .. --stages.

    Stage K runs every program of at most K bits for K steps. Reports are
    printed as each stage completes.
    """
    machine = get_machine(machine_path, settings)
    service = get_enumeration_service(machine, settings)
    for report in service.omega_stages(stages, checkpoint):
        emit(report, output_format, render_stage)


@click.command("oracle")
@machine_option
@click.option("--bits", "omega_bits", required=True, type=BITSTRING, help="Claimed first N bits of Omega.")
@click.option("--fuel", type=click.IntRange(min=1), default=None, help="Stage ceiling.")
@format_option
@click.pass_obj
def oracle(settings: Settings, machine_path: Path, omega_bits: BitString, fuel: Optional[int], output_format: str):
    """
    Decide halting for every program of at most N bits from the first N bits of Omega.

    Exits with status 2 when the bits are provably wrong for the machine.
    """
    machine = get_machine(machine_path, settings)
    ceiling = settings.ORACLE_STAGE_CEILING if fuel is None else fuel
    verdict = get_oracle_service(machine, settings).halting_from_omega_prefix(omega_bits, ceiling)
    emit(verdict, output_format, render_oracle)
    if verdict.diagnostic:
        click.echo(f"warning: {verdict.diagnostic}", err=True)

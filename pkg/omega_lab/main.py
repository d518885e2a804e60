"""
Main omega-lab command-line module.
Sets up the root command group with all commands, settings and logging.
"""

import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from omega_lab.commands import complexity, machine, omega
from omega_lab.config import Settings, load_settings
from omega_lab.errors import InputError, OmegaLabError

logger = logging.getLogger(__name__)


class OmegaLabGroup(click.Group):
    """Root group translating omega-lab errors into exit statuses."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except InputError as e:
            click.echo(f"error: {e}", err=True)
            ctx.exit(2)
        except (OmegaLabError, OSError) as e:
            logger.debug(f"Command failed - Error: {type(e).__name__}")
            click.echo(f"error: {e}", err=True)
            ctx.exit(1)


@click.group(cls=OmegaLabGroup)
@click.option(
    "--config", "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="YAML settings file.",
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Overrides LOG_LEVEL from the settings.",
)
@click.version_option(Settings().APP_VERSION, prog_name="omega-lab")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[Path], log_level: Optional[str]):
    """Executable constructions around the halting probability Omega."""
    active = load_settings(config_path) if config_path is not None else Settings()
    if log_level is not None:
        active = active.model_copy(update={"LOG_LEVEL": log_level.upper()})

    # logging config
    logging.basicConfig(
        level=getattr(logging, active.LOG_LEVEL),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    ctx.obj = active


# all commands
cli.add_command(machine.run_program)
cli.add_command(machine.validate)
cli.add_command(machine.kraft)
cli.add_command(omega.omega_exact)
cli.add_command(omega.omega_stages)
cli.add_command(omega.oracle)
cli.add_command(complexity.complexity)
cli.add_command(complexity.berry)


def dispatch(args: Sequence[str]) -> int:
    """
    Run one command line and return its exit status.

    Results go to stdout, diagnostics to stderr.
    """
    try:
        result = cli.main(args=list(args), prog_name="omega-lab", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

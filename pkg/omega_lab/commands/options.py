"""
Shared click options and parameter types for omega-lab commands.
"""

from pathlib import Path
from typing import Optional

import click

from omega_lab.config import Settings
from omega_lab.errors import InputError
from omega_lab.models.bits import BitString


class BitStringType(click.ParamType):
    """Command-line bitstring: a run of 0/1 digits, possibly empty."""

    name = "bitstring"

    def convert(self, value, param, ctx) -> BitString:
        if isinstance(value, BitString):
            return value
        try:
            return BitString(value)
        except InputError as e:
            self.fail(str(e), param, ctx)


BITSTRING = BitStringType()

machine_option = click.option(
    "--machine", "machine_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Machine spec file (JSON, or YAML by suffix).",
)

format_option = click.option(
    "--format", "output_format",
    type=click.Choice(["text", "structured"]),
    default="text",
    show_default=True,
    help="Human-readable text or one JSON record per line.",
)

fuel_option = click.option(
    "--fuel",
    type=click.IntRange(min=1),
    default=None,
    help="Step budget per program run.",
)


def resolve_fuel(fuel: Optional[int], settings: Settings) -> int:
    return settings.DEFAULT_FUEL if fuel is None else fuel

from pathlib import Path

from omega_lab.config import Settings
from omega_lab.repositories.repository import checkpoint_repository, machine_repository
from omega_lab.services.decider_service import Decider, open_decider
from omega_lab.services.enumeration_service import EnumerationService
from omega_lab.services.machine_service import Machine, build_machine
from omega_lab.services.oracle_service import OracleService


def get_machine(path: Path, settings: Settings) -> Machine:
    """
    Load a machine spec file and build the machine it describes.
    """
    spec = machine_repository.load(path)
    return build_machine(spec, settings.MAX_BITS)


def get_enumeration_service(machine: Machine, settings: Settings) -> EnumerationService:
    """Dependency injection for EnumerationService."""
    return EnumerationService(machine, settings, checkpoint_repository)


def get_oracle_service(machine: Machine, settings: Settings) -> OracleService:
    """Dependency injection for OracleService."""
    return OracleService(machine, settings)


def get_decider(source: str) -> Decider:
    return open_decider(source, machine_repository)

"""
File-backed storage for omega-lab: machine spec files, decider verdict
files and enumeration checkpoints.
"""

import json
import logging
import os
import tempfile
import threading
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import TypeAdapter, ValidationError

from omega_lab.errors import CheckpointMismatchError, MachineSpecError
from omega_lab.models.schema import Checkpoint, MachineSpec, VerdictFile

logger = logging.getLogger(__name__)

_machine_spec_adapter: TypeAdapter = TypeAdapter(MachineSpec)


def read_structured(path: Path) -> Any:
    """Parse a JSON file, or YAML when the suffix says so."""
    with open(path, encoding="utf-8") as handle:
        if path.suffix.lower() in (".yaml", ".yml"):
            return yaml.safe_load(handle)
        return json.load(handle)


class MachineRepository:
    """Loads machine specs and decider verdict files."""

    def load(self, path: Path) -> MachineSpec:
        """
        Load and validate a machine spec file.

        Raises:
            MachineSpecError: If the file does not parse or violates the spec format
            OSError: If the file cannot be read
        """
        try:
            data = read_structured(path)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise MachineSpecError(f"Cannot parse machine spec {path}: {e}") from e
        spec = self.parse(data, source=str(path))
        logger.info(f"Machine spec loaded - Path: {path}, Type: {spec.type}")
        return spec

    def parse(self, data: Any, source: str = "<data>") -> MachineSpec:
        try:
            return _machine_spec_adapter.validate_python(data)
        except ValidationError as e:
            raise MachineSpecError(f"Invalid machine spec {source}: {e}") from e

    def load_verdicts(self, path: Path) -> VerdictFile:
        try:
            return VerdictFile.model_validate(read_structured(path))
        except (json.JSONDecodeError, yaml.YAMLError, ValidationError) as e:
            raise MachineSpecError(f"Invalid verdict file {path}: {e}") from e


class CheckpointRepository:
    """Single-writer checkpoint store; every save replaces the file atomically."""

    def __init__(self):
        self._lock = threading.Lock()

    def load(self, path: Path) -> Optional[Checkpoint]:
        """
        Read a checkpoint, or None when the file does not exist yet.

        Raises:
            CheckpointMismatchError: If the file is not a valid checkpoint
        """
        if not path.exists():
            return None
        try:
            with open(path, encoding="utf-8") as handle:
                return Checkpoint.model_validate_json(handle.read())
        except ValidationError as e:
            raise CheckpointMismatchError(f"Unreadable checkpoint {path}: {e}") from e

    def save(self, path: Path, checkpoint: Checkpoint) -> None:
        """Write to a temporary file in the same directory, then rename over the target."""
        directory = path.parent if str(path.parent) else Path(".")
        with self._lock:
            fd, temp_name = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(checkpoint.model_dump_json(indent=2))
                    handle.write("\n")
                    handle.flush()
                    os.fsync(handle.fileno())
                os.replace(temp_name, path)
            except BaseException:
                if os.path.exists(temp_name):
                    os.unlink(temp_name)
                raise
        logger.info(f"Checkpoint written - Path: {path}, Stage: {checkpoint.stage}")


# Global repository instances
machine_repository = MachineRepository()
checkpoint_repository = CheckpointRepository()

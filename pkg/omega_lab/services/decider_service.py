"""
Halting deciders for the Berry construction.

A decider claims, for any program, whether it halts. The claim is only
a claim: the Berry construction runs the programs and audits it.
"""

import contextlib
import logging
import shlex
import subprocess
from abc import ABC, abstractmethod
from pathlib import Path

from omega_lab.errors import DeciderProtocolError
from omega_lab.models.bits import BitString
from omega_lab.models.schema import ExecConfig, Halted, Verdict, VerdictFile
from omega_lab.repositories.repository import MachineRepository, machine_repository
from omega_lab.services.machine_service import Machine, TableMachine

logger = logging.getLogger(__name__)


class Decider(ABC):
    """Source of claimed halting verdicts (halts / never_halts)."""

    name: str = "decider"

    @abstractmethod
    def decide(self, program: BitString) -> Verdict:
        """
        Claimed verdict for `program`.

        Raises:
            DeciderProtocolError: If no verdict can be obtained
        """

    def close(self) -> None:
        pass

    def __enter__(self) -> "Decider":
        return self

    def __exit__(self, exc_type, exc, traceback) -> None:
        self.close()


class VerdictFileDecider(Decider):
    """Static verdicts read from a file; programs missing from it fall back to its default, if any."""

    def __init__(self, verdicts: VerdictFile, name: str = "verdict-file"):
        self.name = name
        self._default = verdicts.default
        self._verdicts = {BitString(bits): verdict for bits, verdict in verdicts.verdicts.items()}
        for verdict in [self._default, *self._verdicts.values()]:
            if verdict == Verdict.UNDETERMINED:
                raise DeciderProtocolError(f"{name}: a decider must answer halts or never_halts")

    @classmethod
    def from_path(cls, path: Path, repository: MachineRepository = machine_repository) -> "VerdictFileDecider":
        return cls(repository.load_verdicts(path), name=str(path))

    def decide(self, program: BitString) -> Verdict:
        verdict = self._verdicts.get(program, self._default)
        if verdict is None:
            raise DeciderProtocolError(f"{self.name}: no verdict for program {program}")
        return verdict


class SubprocessDecider(Decider):
    """
    External decider process speaking a line protocol on stdin/stdout.

    Request: "HALTS? <bits>"; response: "YES" or "NO". Queries are
    strictly sequential.
    """

    def __init__(self, command: str):
        self.name = command
        try:
            self._process = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as e:
            raise DeciderProtocolError(f"Cannot start decider {command!r}: {e}") from e
        logger.info(f"Decider process started - Command: {command}, PID: {self._process.pid}")

    def decide(self, program: BitString) -> Verdict:
        try:
            self._process.stdin.write(f"HALTS? {program}\n")
            self._process.stdin.flush()
            response = self._process.stdout.readline()
        except (BrokenPipeError, OSError) as e:
            raise DeciderProtocolError(f"Decider {self.name!r} failed on {program}: {e}") from e
        answer = response.strip()
        if answer == "YES":
            return Verdict.HALTS
        if answer == "NO":
            return Verdict.NEVER_HALTS
        if not response:
            raise DeciderProtocolError(f"Decider {self.name!r} closed its output before answering {program}")
        raise DeciderProtocolError(f"Decider {self.name!r} answered {answer!r} to {program}; expected YES or NO")

    def close(self) -> None:
        if self._process.poll() is None:
            try:
                self._process.stdin.close()
                self._process.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self._process.kill()
                self._process.wait()
        for stream in (self._process.stdin, self._process.stdout):
            with contextlib.suppress(OSError):
                stream.close()


class TableDecider(Decider):
    """Exact decider for a table machine: a program halts iff it is a key."""

    name = "table"

    def __init__(self, machine: TableMachine):
        self.machine = machine

    def decide(self, program: BitString) -> Verdict:
        return Verdict.HALTS if self.machine.is_valid(program) else Verdict.NEVER_HALTS


class StepBoundedDecider(Decider):
    """Claims a program halts iff it halts within a fixed number of steps."""

    def __init__(self, machine: Machine, steps: int):
        self.name = f"halts-within-{steps}-steps"
        self.machine = machine
        self.config = ExecConfig(fuel=steps)

    def decide(self, program: BitString) -> Verdict:
        outcome = self.machine.run(program, self.config)
        return Verdict.HALTS if isinstance(outcome, Halted) else Verdict.NEVER_HALTS


class UniformDecider(Decider):
    """Gives the same answer to every query."""

    def __init__(self, verdict: Verdict):
        if verdict == Verdict.UNDETERMINED:
            raise DeciderProtocolError("A decider must answer halts or never_halts")
        self.name = f"always-{verdict.value}"
        self.verdict = verdict

    def decide(self, program: BitString) -> Verdict:
        return self.verdict


def open_decider(source: str, repository: MachineRepository = machine_repository) -> Decider:
    """An existing file is a verdict file; anything else is a command line."""
    path = Path(source)
    if path.is_file():
        return VerdictFileDecider.from_path(path, repository)
    return SubprocessDecider(source)

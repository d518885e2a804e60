"""
Staged dovetailer: at stage K run every program up to K bits for K steps
and report the resulting lower bound Omega_K on the halting probability.
"""

import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Mapping, Optional

from omega_lab.config import Settings, settings as default_settings
from omega_lab.errors import CheckpointMismatchError, ConfigurationError, UnsupportedOperationError
from omega_lab.models.bits import BitString, DyadicRational
from omega_lab.models.schema import Checkpoint, ExecConfig, Exhausted, Halted, HaltedProgram, RunOutcome, StageReport
from omega_lab.repositories.repository import CheckpointRepository, checkpoint_repository
from omega_lab.services.coding import binary_expansion, count_bitstrings, kraft_sum
from omega_lab.services.machine_service import Machine, TableMachine, run

logger = logging.getLogger(__name__)


def state_digest(programs: Iterable[BitString]) -> str:
    """SHA-256 over each program's bits plus a newline, in length-lex order."""
    digest = hashlib.sha256()
    for program in sorted(programs):
        digest.update(f"{program}\n".encode("utf-8"))
    return digest.hexdigest()


def agreeing_prefix(a: DyadicRational, b: DyadicRational, digits: int) -> Optional[int]:
    """Number of leading binary digits `a` and `b` share among their first `digits`; None if either is 1 or more."""
    if not (a < 1 and b < 1):
        return None
    left, right = binary_expansion(a, digits), binary_expansion(b, digits)
    for position in range(digits):
        if left[position] != right[position]:
            return position
    return digits


class EnumerationService:
    """Service class for the staged lower-bound computation of Omega."""

    def __init__(
        self,
        machine: Machine,
        settings: Settings = default_settings,
        checkpoints: CheckpointRepository = checkpoint_repository,
    ):
        """
        Initialize the enumeration service.

        Args:
            machine: Machine whose halting probability is bounded
            settings: Active settings (length bound, worker count)
            checkpoints: Checkpoint store used when resuming
        """
        self.machine = machine
        self.settings = settings
        self.checkpoints = checkpoints
        self._exact: Optional[DyadicRational] = None
        if isinstance(machine, TableMachine) and machine.validation.kraft_sum < 1:
            self._exact = machine.validation.kraft_sum

    def stage_run(self, stage: int, prior: Mapping[BitString, HaltedProgram]) -> StageReport:
        """
        Run stage K: every valid program of length <= K not already known to halt, with fuel K.

        Args:
            stage: Stage number K
            prior: Programs found halting at earlier stages

        Returns:
            Stage report with the newly halted programs and the cumulative Omega_K

        Raises:
            ConfigurationError: If K is below 1 or beyond the length bound
        """
        self._check_stage(stage)
        started = time.perf_counter()
        config = ExecConfig(fuel=stage)

        candidates: List[BitString] = []
        valid = 0
        for program in self.machine.programs(stage):
            valid += 1
            if program not in prior:
                candidates.append(program)

        newly_halted: List[HaltedProgram] = []
        exhausted = 0
        for program, outcome in zip(candidates, self._run_all(candidates, config)):
            if isinstance(outcome, Halted):
                newly_halted.append(HaltedProgram(program=program, output=outcome.output, steps=outcome.steps))
            elif isinstance(outcome, Exhausted):
                exhausted += 1
            logger.debug(f"Stage {stage} - Program: {program}, Outcome: {outcome.kind}")

        halted_programs = list(prior) + [entry.program for entry in newly_halted]
        omega_lower = kraft_sum(halted_programs)
        report = StageReport(
            stage=stage,
            newly_halted=newly_halted,
            omega_lower=omega_lower,
            cumulative_halted_count=len(halted_programs),
            state_digest=state_digest(halted_programs),
            valid_programs=valid,
            invalid_strings=count_bitstrings(stage) - valid,
            exhausted=exhausted,
            agreeing_bits=agreeing_prefix(omega_lower, self._exact, stage) if self._exact is not None else None,
        )
        logger.info(
            f"Stage {stage} complete - New: {len(newly_halted)}, Halted: {len(halted_programs)}, "
            f"Omega_K: {omega_lower}, Elapsed: {time.perf_counter() - started:.3f}s"
        )
        return report

    def omega_stages(self, max_stage: int, checkpoint: Optional[Path] = None) -> Iterator[StageReport]:
        """
        Stream stage reports for K = 1 .. max_stage, resuming after a checkpoint when one exists.

        Args:
            max_stage: Last stage to run
            checkpoint: Checkpoint file, rewritten after every stage

        Returns:
            Iterator of stage reports in stage order

        Raises:
            ConfigurationError: If max_stage is below 1 or beyond the length bound
            CheckpointMismatchError: If the checkpoint belongs to another machine
        """
        self._check_stage(max_stage)
        halted: Dict[BitString, HaltedProgram] = {}
        start = 1
        if checkpoint is not None:
            saved = self.checkpoints.load(checkpoint)
            if saved is not None:
                halted = self._restore(saved)
                start = saved.stage + 1
                logger.info(f"Resuming after stage {saved.stage} - Halted: {len(halted)}")
        return self._stages(start, max_stage, halted, checkpoint)

    def _stages(
        self,
        start: int,
        max_stage: int,
        halted: Dict[BitString, HaltedProgram],
        checkpoint: Optional[Path],
    ) -> Iterator[StageReport]:
        for stage in range(start, max_stage + 1):
            report = self.stage_run(stage, halted)
            for entry in report.newly_halted:
                halted[entry.program] = entry
            if checkpoint is not None:
                self.checkpoints.save(checkpoint, Checkpoint(
                    machine_digest=self.machine.digest(),
                    stage=stage,
                    halted=sorted(halted.values(), key=lambda entry: entry.program),
                    omega_lower=report.omega_lower,
                    state_digest=report.state_digest,
                ))
            yield report

    def exact_omega(self) -> DyadicRational:
        """
        Exact halting probability of a table machine: the Kraft sum of its keys.

        Raises:
            UnsupportedOperationError: For the universal machine, whose Omega is uncomputable
        """
        if not isinstance(self.machine, TableMachine):
            raise UnsupportedOperationError(
                "Exact Omega is uncomputable for a universal machine; "
                "omega-stages gives lower bounds, and no upper bound can be computed"
            )
        return self.machine.validation.kraft_sum

    def _restore(self, saved: Checkpoint) -> Dict[BitString, HaltedProgram]:
        if saved.machine_digest != self.machine.digest():
            raise CheckpointMismatchError(
                f"Checkpoint was written for machine {saved.machine_digest[:12]}, "
                f"not {self.machine.digest()[:12]}; refusing to resume"
            )
        halted = {entry.program: entry for entry in saved.halted}
        if len(halted) != len(saved.halted) or state_digest(halted) != saved.state_digest:
            raise CheckpointMismatchError("Checkpoint halted set does not match its state digest")
        if kraft_sum(halted) != saved.omega_lower:
            raise CheckpointMismatchError("Checkpoint omega_lower does not match its halted set")
        return halted

    def _run_all(self, programs: List[BitString], config: ExecConfig) -> Iterator[RunOutcome]:
        # Executor.map yields in submission order, so reports stay in length-lex order.
        workers = self.settings.STAGE_WORKERS
        if workers <= 1 or len(programs) < 2 * workers:
            return (self.machine.run(program, config) for program in programs)
        chunksize = max(1, len(programs) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return iter(list(executor.map(partial(run, self.machine, config=config), programs, chunksize=chunksize)))

    def _check_stage(self, stage: int) -> None:
        if stage < 1:
            raise ConfigurationError(f"Stage must be at least 1, got {stage}")
        if stage > self.settings.MAX_BITS:
            raise ConfigurationError(f"Stage {stage} exceeds the {self.settings.MAX_BITS}-bit length bound")

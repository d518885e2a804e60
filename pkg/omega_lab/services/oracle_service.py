"""
Oracle service: deciding halting from a prefix of Omega, bounding
program-size complexity, and the Berry construction.
"""

import logging
from typing import Dict, Iterable, List, Optional, Set

from omega_lab.config import Settings, settings as default_settings
from omega_lab.errors import ConfigurationError, InconsistentOmegaError
from omega_lab.models.bits import BitString, DyadicRational
from omega_lab.models.schema import (
    AuditEntry, BerryOutcome, BoundKind, ComplexityBound, ExecConfig, Exhausted, Halted, HaltedProgram,
    OracleVerdict, Verdict,
)
from omega_lab.services.coding import require_within_bound
from omega_lab.services.decider_service import Decider
from omega_lab.services.enumeration_service import EnumerationService
from omega_lab.services.machine_service import Machine

logger = logging.getLogger(__name__)


def least_positive_missing(produced: Set[int]) -> int:
    candidate = 1
    while candidate in produced:
        candidate += 1
    return candidate


class OracleService:
    """Service class for the reductions built on top of fuel-bounded runs."""

    def __init__(self, machine: Machine, settings: Settings = default_settings):
        """
        Initialize the oracle service.

        Args:
            machine: Machine the reductions run against
            settings: Active settings
        """
        self.machine = machine
        self.settings = settings

    def halting_from_omega_prefix(self, omega_bits: BitString, fuel_ceiling: int) -> OracleVerdict:
        """
        Decide halting for every program of at most N bits from the first N bits of Omega.

        Stages run until Omega_K reaches the truncation .b1...bN. From then on any
        undiscovered program of at most N bits would push Omega past .b1...bN + 1/2^N,
        so every program not yet seen halting never halts.

        Args:
            omega_bits: Purported first N bits of the machine's Omega
            fuel_ceiling: Last stage to try before giving up

        Returns:
            Verdicts for all strings of length 1..N

        Raises:
            InconsistentOmegaError: If some Omega_K reaches .b1...bN + 1/2^N
            ConfigurationError: If N or the ceiling is out of range
        """
        size = len(omega_bits)
        if size < 1:
            raise ConfigurationError("Need at least one bit of Omega")
        require_within_bound(omega_bits, self.settings.MAX_BITS)
        if fuel_ceiling < 1:
            raise ConfigurationError(f"Stage ceiling must be at least 1, got {fuel_ceiling}")
        ceiling = fuel_ceiling
        if ceiling > self.settings.MAX_BITS:
            logger.warning(f"Stage ceiling {ceiling} clamped to the {self.settings.MAX_BITS}-bit length bound")
            ceiling = self.settings.MAX_BITS

        threshold = DyadicRational.from_bits(omega_bits)
        overshoot = threshold + DyadicRational.weight(size)
        logger.info(f"Oracle started - Bits: {omega_bits}, Threshold: {threshold}, Ceiling: {ceiling}")

        halted: Dict[BitString, HaltedProgram] = {}
        omega_lower = DyadicRational()
        last_stage = 0
        for report in EnumerationService(self.machine, self.settings).omega_stages(ceiling):
            for entry in report.newly_halted:
                halted[entry.program] = entry
            omega_lower = report.omega_lower
            last_stage = report.stage
            if omega_lower >= overshoot:
                raise InconsistentOmegaError(
                    f"Omega_{report.stage} = {omega_lower} reaches {threshold} + 1/2^{size}: "
                    f"{omega_bits} cannot be the first {size} bits of this machine's Omega"
                )
            if omega_lower >= threshold:
                logger.info(f"Threshold crossed - Stage: {report.stage}, Omega_K: {omega_lower}")
                return OracleVerdict(
                    omega_bits=omega_bits,
                    threshold=threshold,
                    fuel_ceiling=fuel_ceiling,
                    resolved=True,
                    stage=report.stage,
                    last_stage=report.stage,
                    omega_lower=omega_lower,
                    halting=self._within(halted, size),
                )

        undetermined = [program for program in self.machine.programs(size) if program not in halted]
        diagnostic = (
            f"Stage ceiling {ceiling} reached with Omega_{last_stage} = {omega_lower} "
            f"still below the threshold {threshold}; either more stages are needed "
            f"or the supplied bits are too large for this machine"
        )
        logger.warning(diagnostic)
        return OracleVerdict(
            omega_bits=omega_bits,
            threshold=threshold,
            fuel_ceiling=fuel_ceiling,
            resolved=False,
            stage=None,
            last_stage=last_stage,
            omega_lower=omega_lower,
            halting=self._within(halted, size),
            undetermined=undetermined,
            diagnostic=diagnostic,
        )

    def complexity_upper(self, target: BitString, size_bound: int, fuel: int) -> ComplexityBound:
        """
        Smallest program of at most `size_bound` bits seen to output `target` within `fuel` steps.

        The bound is exact when no program shorter than the witness ran out of
        fuel; otherwise a slow shorter program might still produce the target.

        Args:
            target: Output to produce
            size_bound: Largest program size searched, in bits
            fuel: Step budget per program

        Returns:
            Complexity bound with witness when one was found
        """
        require_within_bound(target, self.settings.MAX_BITS)
        self._check_bound(size_bound)
        config = ExecConfig(fuel=fuel)
        smallest_exhausted: Optional[int] = None

        for program in self.machine.programs(size_bound):
            outcome = self.machine.run(program, config)
            if isinstance(outcome, Halted) and outcome.output == target:
                exact = smallest_exhausted is None or smallest_exhausted >= len(program)
                bound = ComplexityBound(
                    target=target,
                    bound_kind=BoundKind.EXACT if exact else BoundKind.UPPER,
                    value=len(program),
                    witness=program,
                    witness_steps=outcome.steps,
                    size_bound=size_bound,
                    fuel=fuel,
                    smallest_exhausted=smallest_exhausted,
                    explanation=(
                        "no shorter program ran out of fuel" if exact else
                        f"a {smallest_exhausted}-bit program ran out of fuel and might still produce the target"
                    ),
                )
                logger.info(f"Complexity bound - Target: {target or '(empty)'}, Value: {bound.value}, Kind: {bound.bound_kind.value}")
                return bound
            if isinstance(outcome, Exhausted) and smallest_exhausted is None:
                smallest_exhausted = len(program)

        exact = smallest_exhausted is None
        return ComplexityBound(
            target=target,
            bound_kind=BoundKind.EXACT if exact else BoundKind.UPPER,
            value=None,
            size_bound=size_bound,
            fuel=fuel,
            smallest_exhausted=smallest_exhausted,
            explanation=(
                f"no program of at most {size_bound} bits produces the target" if exact else
                f"no program of at most {size_bound} bits was seen to produce the target, "
                f"but programs from {smallest_exhausted} bits up ran out of fuel"
            ),
        )

    def first_complex_integer(self, size_bound: int, fuel: int) -> BerryOutcome:
        """
        Least positive integer not produced by any program of at most `size_bound` bits.

        Outputs become integers through the length-lex bijection. Programs that
        ran out of fuel are audited: if one of them eventually halts it may
        produce the returned integer.

        Args:
            size_bound: Largest program size M, in bits
            fuel: Step budget per program

        Returns:
            Berry outcome with the exhausted programs as audit
        """
        self._check_bound(size_bound)
        config = ExecConfig(fuel=fuel)
        produced: Set[int] = set()
        audit: List[AuditEntry] = []
        for program in self.machine.programs(size_bound):
            outcome = self.machine.run(program, config)
            if isinstance(outcome, Halted):
                produced.add(outcome.output.index)
            elif isinstance(outcome, Exhausted):
                audit.append(AuditEntry(program=program, observed="exhausted"))

        integer = least_positive_missing(produced)
        logger.info(f"First complex integer - Bound: {size_bound}, Integer: {integer}, Produced: {len(produced)}")
        return BerryOutcome(
            size=size_bound,
            multiplier=1,
            program_bound=size_bound,
            fuel=fuel,
            integer_found=integer,
            produced_set_size=len(produced),
            produced=sorted(produced),
            audit=audit,
        )

    def berry_demo(self, decider: Decider, size: int, fuel: int, multiplier: Optional[int] = None) -> BerryOutcome:
        """
        Run the Berry program's logic against a claimed halting decider.

        Every valid program of at most multiplier * size bits is put to the
        decider; claimed halters are run and their outputs collected, and the
        least positive integer not among them is returned. All programs are run
        so that every claim the execution contradicts is flagged.

        Args:
            decider: Claimed total halting decider
            size: Size parameter N standing in for the program's own size
            fuel: Step budget per program
            multiplier: Bound multiplier (defaults to the configured one)

        Returns:
            Berry outcome with the full audit and the contradicted claims

        Raises:
            DeciderProtocolError: If the decider fails to answer
        """
        multiplier = multiplier or self.settings.BERRY_MULTIPLIER
        if size < 1:
            raise ConfigurationError(f"Size parameter must be at least 1, got {size}")
        bound = size * multiplier
        self._check_bound(bound)
        config = ExecConfig(fuel=fuel)

        produced: Set[int] = set()
        audit: List[AuditEntry] = []
        for program in self.machine.programs(bound):
            claimed = decider.decide(program)
            outcome = self.machine.run(program, config)
            halted = isinstance(outcome, Halted)
            if claimed == Verdict.HALTS and halted:
                produced.add(outcome.output.index)
            audit.append(AuditEntry(
                program=program,
                claimed=claimed,
                observed="halted" if halted else "exhausted",
                output=outcome.output if halted else None,
                steps=outcome.steps if halted else None,
                contradiction=(claimed == Verdict.HALTS) != halted,
            ))

        contradictions = [entry for entry in audit if entry.contradiction]
        integer = least_positive_missing(produced)
        logger.info(
            f"Berry construction - Decider: {decider.name}, Bound: {bound}, "
            f"Integer: {integer}, Contradictions: {len(contradictions)}"
        )
        return BerryOutcome(
            size=size,
            multiplier=multiplier,
            program_bound=bound,
            fuel=fuel,
            integer_found=integer,
            produced_set_size=len(produced),
            produced=sorted(produced),
            audit=audit,
            contradictions=contradictions,
            decider=decider.name,
        )

    def _within(self, halted: Iterable[BitString], size: int) -> List[BitString]:
        return sorted(program for program in halted if len(program) <= size)

    def _check_bound(self, size_bound: int) -> None:
        if size_bound < 1:
            raise ConfigurationError(f"Size bound must be at least 1, got {size_bound}")
        if size_bound > self.settings.MAX_BITS:
            raise ConfigurationError(f"Size bound {size_bound} exceeds the {self.settings.MAX_BITS}-bit length bound")

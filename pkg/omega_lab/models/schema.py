"""
Pydantic models for machine specs, run outcomes, reports and verdicts.
These models define the file formats and the structured output contract.
"""

from enum import Enum
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, computed_field

from omega_lab.models.bits import BitString, DyadicRational, iter_bitstrings


class PrefixVerdict(BaseModel):
    """Result of a prefix-freeness check."""

    model_config = ConfigDict(frozen=True)

    ok: bool
    witness: Optional[Tuple[BitString, BitString]] = None


class KraftContribution(BaseModel):
    program: BitString
    length: int
    weight: DyadicRational


class KraftReport(BaseModel):
    """Exact Kraft sum of a prefix-free code with per-member contributions."""

    members: int = Field(..., ge=0)
    kraft_sum: DyadicRational
    complete: bool = Field(..., description="True when the sum equals 1")
    contributions: List[KraftContribution] = Field(default_factory=list)


# Machine spec files
class TableEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bits: BitString
    output: BitString = Field(default_factory=BitString)


class TableMachineSpec(BaseModel):
    """A finite machine given by its halting programs and their outputs."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    format: Literal[1] = 1
    type: Literal["table"]
    programs: List[TableEntry] = Field(..., min_length=1)


class UniversalMachineSpec(BaseModel):
    """The reference self-delimiting universal machine."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    format: Literal[1] = 1
    type: Literal["universal"]
    isa: Literal["bitbf-v1"]


MachineSpec = Annotated[Union[TableMachineSpec, UniversalMachineSpec], Field(discriminator="type")]


class TableValidation(BaseModel):
    program_count: int
    max_length: int
    kraft_sum: DyadicRational
    boundary: bool = Field(..., description="Kraft sum equals 1: no further program could ever halt")


class MachineSummary(BaseModel):
    """What `validate` reports about a loaded machine."""

    type: Literal["table", "universal"]
    digest: str
    isa: Optional[str] = None
    table: Optional[TableValidation] = None


class ExactOmega(BaseModel):
    """Exact halting probability of a table machine."""

    omega: DyadicRational
    digits: int = Field(..., ge=0, description="Binary digits rendered: the longest key length")
    boundary: bool

    @computed_field
    @property
    def omega_binary(self) -> str:
        return self.omega.to_binary(self.digits)


# Execution
class ExecConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    fuel: int = Field(..., ge=1, description="Maximum number of steps")


class DecodeReason(str, Enum):
    TRUNCATED_HEADER = "truncated header"
    TRUNCATED_BODY = "truncated body"
    TRAILING_BITS = "trailing bits"
    UNBALANCED_LOOPS = "unbalanced loops"
    NOT_IN_TABLE = "not in table"


class Halted(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["halted"] = "halted"
    output: BitString
    steps: int = Field(..., ge=0)
    bits_consumed: int = Field(..., ge=0)


class Exhausted(BaseModel):
    """Fuel ran out; says nothing about whether the program halts."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["exhausted"] = "exhausted"
    fuel: int


class Invalid(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["invalid"] = "invalid"
    reason: DecodeReason
    detail: str = ""


RunOutcome = Annotated[Union[Halted, Exhausted, Invalid], Field(discriminator="kind")]


# Enumeration
class HaltedProgram(BaseModel):
    model_config = ConfigDict(frozen=True)

    program: BitString
    output: BitString
    steps: int


class StageReport(BaseModel):
    """Everything learned at stage K of the dovetailer."""

    stage: int = Field(..., ge=1)
    newly_halted: List[HaltedProgram] = Field(default_factory=list)
    omega_lower: DyadicRational
    cumulative_halted_count: int = Field(..., ge=0)
    state_digest: str
    valid_programs: int = Field(..., ge=0)
    invalid_strings: int = Field(..., ge=0)
    exhausted: int = Field(..., ge=0)
    agreeing_bits: Optional[int] = None

    @computed_field
    @property
    def omega_binary(self) -> str:
        return self.omega_lower.to_binary(self.stage)


class Checkpoint(BaseModel):
    """Resumable enumeration state after the last completed stage."""

    model_config = ConfigDict(extra="forbid")

    format: Literal[1] = 1
    digest_algorithm: Literal["sha256"] = "sha256"
    machine_digest: str
    stage: int = Field(..., ge=1)
    halted: List[HaltedProgram]
    omega_lower: DyadicRational
    state_digest: str


# Oracle
class Verdict(str, Enum):
    HALTS = "halts"
    NEVER_HALTS = "never_halts"
    UNDETERMINED = "undetermined"


class OracleVerdict(BaseModel):
    """
    Halting verdicts for every bitstring of length 1..N.

    Listed halters halt, listed undetermined programs are unresolved, and
    every other string never halts.
    """

    omega_bits: BitString
    threshold: DyadicRational
    fuel_ceiling: int
    resolved: bool
    stage: Optional[int] = Field(None, description="Stage at which the threshold was crossed")
    last_stage: int
    omega_lower: DyadicRational
    halting: List[BitString] = Field(default_factory=list)
    undetermined: List[BitString] = Field(default_factory=list)
    diagnostic: Optional[str] = None

    @computed_field
    @property
    def max_length(self) -> int:
        return len(self.omega_bits)

    def verdict(self, program: BitString) -> Verdict:
        if program in self.halting:
            return Verdict.HALTS
        if program in self.undetermined:
            return Verdict.UNDETERMINED
        return Verdict.NEVER_HALTS

    def verdicts(self) -> Dict[BitString, Verdict]:
        halting = set(self.halting)
        undetermined = set(self.undetermined)
        result = {}
        for program in iter_bitstrings(self.max_length, min_length=1):
            if program in halting:
                result[program] = Verdict.HALTS
            elif program in undetermined:
                result[program] = Verdict.UNDETERMINED
            else:
                result[program] = Verdict.NEVER_HALTS
        return result


class BoundKind(str, Enum):
    EXACT = "exact"
    UPPER = "upper"


class Irreducibility(str, Enum):
    COMPRESSIBLE = "compressible"
    IRREDUCIBLE = "irreducible"
    UNDETERMINED = "undetermined"


class ComplexityBound(BaseModel):
    """Result of a fuel-bounded search for the smallest program producing a target."""

    target: BitString
    bound_kind: BoundKind
    value: Optional[int] = Field(None, description="Program size in bits; None means infinite within the bound")
    witness: Optional[BitString] = None
    witness_steps: Optional[int] = None
    size_bound: int
    fuel: int
    smallest_exhausted: Optional[int] = Field(None, description="Size of the shortest program that ran out of fuel")
    explanation: str = ""

    @computed_field
    @property
    def irreducibility(self) -> Irreducibility:
        size = len(self.target)
        if self.value is not None and self.value < size:
            return Irreducibility.COMPRESSIBLE
        covered = self.size_bound >= size - 1
        if covered and (self.smallest_exhausted is None or self.smallest_exhausted >= size):
            return Irreducibility.IRREDUCIBLE
        return Irreducibility.UNDETERMINED


class AuditEntry(BaseModel):
    program: BitString
    claimed: Optional[Verdict] = None
    observed: Literal["halted", "exhausted"]
    output: Optional[BitString] = None
    steps: Optional[int] = None
    contradiction: bool = False


class BerryOutcome(BaseModel):
    """The least positive integer no program up to the size bound was seen to produce."""

    size: int = Field(..., ge=1)
    multiplier: int = Field(..., ge=1)
    program_bound: int
    fuel: int
    integer_found: int = Field(..., ge=1)
    produced_set_size: int
    produced: List[int] = Field(default_factory=list)
    audit: List[AuditEntry] = Field(default_factory=list)
    contradictions: List[AuditEntry] = Field(default_factory=list)
    decider: Optional[str] = None


class VerdictFile(BaseModel):
    """Static decider: claimed verdicts keyed by program bits."""

    model_config = ConfigDict(extra="forbid")

    format: Literal[1] = 1
    default: Optional[Verdict] = None
    verdicts: Dict[str, Verdict] = Field(default_factory=dict)

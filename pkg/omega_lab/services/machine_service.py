"""
Halting models: a finite table machine and the reference self-delimiting
universal machine "bitbf-v1", both run under an explicit step budget.
"""

import hashlib
import itertools
import json
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

from omega_lab.errors import MachineSpecError, TruncationError
from omega_lab.models.bits import BitString, PrefixCode
from omega_lab.models.schema import (
    DecodeReason, ExecConfig, Exhausted, Halted, Invalid, MachineSpec, MachineSummary, RunOutcome,
    TableMachineSpec, TableValidation, UniversalMachineSpec,
)
from omega_lab.services.coding import BitReader, gamma_decode, gamma_encode, gamma_length, kraft_sum, require_within_bound

logger = logging.getLogger(__name__)

ISA_VERSION = "bitbf-v1"
OPCODE_WIDTH = 3


class Opcode(IntEnum):
    HALT = 0b000
    INC = 0b001
    DEC = 0b010
    LEFT = 0b011
    RIGHT = 0b100
    LOOP_BEGIN = 0b101
    LOOP_END = 0b110
    OUT = 0b111


@dataclass(frozen=True)
class DecodedProgram:
    """A statically valid bitbf-v1 program with its bracket matching resolved."""

    instructions: Tuple[Opcode, ...]
    jumps: Tuple[int, ...]
    bits_consumed: int


def match_loops(instructions: Iterable[Opcode]) -> Optional[Tuple[int, ...]]:
    """Index of the matching bracket for every loop opcode, -1 elsewhere; None if unbalanced."""
    instructions = list(instructions)
    jumps = [-1] * len(instructions)
    stack: List[int] = []
    for pc, op in enumerate(instructions):
        if op == Opcode.LOOP_BEGIN:
            stack.append(pc)
        elif op == Opcode.LOOP_END:
            if not stack:
                return None
            start = stack.pop()
            jumps[start] = pc
            jumps[pc] = start
    if stack:
        return None
    return tuple(jumps)


def decode_program(program: BitString) -> Union[DecodedProgram, Invalid]:
    """
    Statically decode a bitbf-v1 program: gamma(n) then n three-bit opcodes.

    Args:
        program: Candidate program bits

    Returns:
        The decoded program, or an Invalid outcome carrying the rejection reason
    """
    reader = BitReader(program)
    try:
        count, header_bits = gamma_decode(reader)
    except TruncationError as e:
        return Invalid(reason=DecodeReason.TRUNCATED_HEADER, detail=str(e))

    body_bits = OPCODE_WIDTH * count
    if reader.remaining < body_bits:
        return Invalid(
            reason=DecodeReason.TRUNCATED_BODY,
            detail=f"header announces {count} instructions ({body_bits} bits), {reader.remaining} bits follow",
        )
    instructions = tuple(Opcode(reader.read_uint(OPCODE_WIDTH)) for _ in range(count))
    if reader.remaining:
        return Invalid(
            reason=DecodeReason.TRAILING_BITS,
            detail=f"{reader.remaining} bits after a complete {header_bits + body_bits}-bit program",
        )

    jumps = match_loops(instructions)
    if jumps is None:
        return Invalid(reason=DecodeReason.UNBALANCED_LOOPS, detail="loop brackets do not match")
    return DecodedProgram(instructions=instructions, jumps=jumps, bits_consumed=header_bits + body_bits)


def encode_program(instructions: Iterable[Opcode]) -> BitString:
    """Program bits for an instruction list (the inverse of decode_program)."""
    instructions = list(instructions)
    body = "".join(format(int(op), "03b") for op in instructions)
    return gamma_encode(len(instructions)) + BitString(body)


def print_program(target: BitString) -> BitString:
    """
    Straight-line program that emits `target`.

    OUT prints the parity of the current cell, so each bit is an OUT preceded
    by an INC whenever the bit differs from the previous one. At most
    2 * len(target) instructions; the empty target is a lone HALT.
    """
    instructions: List[Opcode] = []
    parity = 0
    for bit in target:
        if bit != parity:
            instructions.append(Opcode.INC)
            parity = bit
        instructions.append(Opcode.OUT)
    if not instructions:
        instructions.append(Opcode.HALT)
    return encode_program(instructions)


def execute(decoded: DecodedProgram, fuel: int) -> Union[Halted, Exhausted]:
    """
    Interpret a decoded program for at most `fuel` steps.

    One step is one opcode execution, jumps included. Falling off the end
    of the instruction list halts normally.
    """
    instructions = decoded.instructions
    jumps = decoded.jumps
    tape: Dict[int, int] = {}
    head = 0
    pc = 0
    steps = 0
    output: List[int] = []

    while pc < len(instructions):
        if steps >= fuel:
            return Exhausted(fuel=fuel)
        op = instructions[pc]
        steps += 1
        if op == Opcode.HALT:
            break
        if op == Opcode.INC:
            tape[head] = tape.get(head, 0) + 1
        elif op == Opcode.DEC:
            if tape.get(head, 0):
                tape[head] -= 1
        elif op == Opcode.LEFT:
            head -= 1
        elif op == Opcode.RIGHT:
            head += 1
        elif op == Opcode.LOOP_BEGIN:
            if not tape.get(head, 0):
                pc = jumps[pc]
        elif op == Opcode.LOOP_END:
            if tape.get(head, 0):
                pc = jumps[pc]
        elif op == Opcode.OUT:
            output.append(tape.get(head, 0) & 1)
        pc += 1

    return Halted(output=BitString(output), steps=steps, bits_consumed=decoded.bits_consumed)


class Machine(ABC):
    """A prefix-free halting model: which programs are valid and what running them does."""

    kind: str

    def __init__(self, spec: Union[TableMachineSpec, UniversalMachineSpec]):
        self.spec = spec

    @abstractmethod
    def run(self, program: BitString, config: ExecConfig) -> RunOutcome:
        """Run `program` under `config`; deterministic in all inputs."""

    @abstractmethod
    def programs(self, max_length: int) -> Iterator[BitString]:
        """Valid programs of length 1..max_length in length-lex order."""

    @abstractmethod
    def is_valid(self, program: BitString) -> bool:
        """Whether the machine accepts `program` statically."""

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of the spec."""
        canonical = json.dumps(self._canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def _canonical(self) -> dict:
        return self.spec.model_dump(mode="json")

    @abstractmethod
    def describe(self) -> MachineSummary:
        """Summary reported by `validate`."""


class TableMachine(Machine):
    """Finite machine whose halting programs, and their outputs, are listed explicitly."""

    kind = "table"

    def __init__(self, spec: TableMachineSpec, max_bits: Optional[int] = None):
        super().__init__(spec)
        self.validation = validate_table(spec, max_bits)
        self._table: Dict[BitString, BitString] = {entry.bits: entry.output for entry in spec.programs}
        self._keys: Tuple[BitString, ...] = tuple(sorted(self._table))

    @property
    def keys(self) -> Tuple[BitString, ...]:
        return self._keys

    def run(self, program: BitString, config: ExecConfig) -> RunOutcome:
        output = self._table.get(program)
        if output is None:
            return Invalid(reason=DecodeReason.NOT_IN_TABLE, detail=f"{program or '(empty)'} is not a table key")
        return Halted(output=output, steps=1, bits_consumed=len(program))

    def programs(self, max_length: int) -> Iterator[BitString]:
        return (key for key in self._keys if len(key) <= max_length)

    def is_valid(self, program: BitString) -> bool:
        return program in self._table

    def _canonical(self) -> dict:
        data = self.spec.model_dump(mode="json")
        data["programs"] = [
            {"bits": str(key), "output": str(self._table[key])} for key in self._keys
        ]
        return data

    def describe(self) -> MachineSummary:
        return MachineSummary(type="table", digest=self.digest(), table=self.validation)


class UniversalMachine(Machine):
    """The bitbf-v1 reference machine: a gamma length header then 3-bit opcodes on an unbounded tape."""

    kind = "universal"

    def run(self, program: BitString, config: ExecConfig) -> RunOutcome:
        decoded = self.decode_program(program)
        if isinstance(decoded, Invalid):
            return decoded
        return execute(decoded, config.fuel)

    def decode_program(self, program: BitString) -> Union[DecodedProgram, Invalid]:
        return decode_program(program)

    def programs(self, max_length: int) -> Iterator[BitString]:
        # Program length 2*floor(log2 n) + 1 + 3n grows with n, so ascending n is length-lex order.
        for count in itertools.count(1):
            if gamma_length(count) + OPCODE_WIDTH * count > max_length:
                return
            header = gamma_encode(count)
            for instructions in itertools.product(Opcode, repeat=count):
                if match_loops(instructions) is not None:
                    body = "".join(format(int(op), "03b") for op in instructions)
                    yield header + BitString(body)

    def is_valid(self, program: BitString) -> bool:
        return not isinstance(decode_program(program), Invalid)

    def describe(self) -> MachineSummary:
        return MachineSummary(type="universal", digest=self.digest(), isa=self.spec.isa)


def validate_table(spec: TableMachineSpec, max_bits: Optional[int] = None) -> TableValidation:
    """
    Check a table machine's keys and report its Kraft sum.

    Args:
        spec: Table machine spec
        max_bits: Length bound (defaults to the configured one)

    Returns:
        Program count, longest key, Kraft sum and the sum-equals-1 boundary flag

    Raises:
        PrefixViolationError: If the keys are not prefix-free
        DuplicateMemberError: If a key is listed twice
        MachineSpecError: If a key is empty
    """
    keys = [entry.bits for entry in spec.programs]
    for key in keys:
        if not key:
            raise MachineSpecError("Table keys must be non-empty bitstrings")
        require_within_bound(key, max_bits)
    code = PrefixCode(keys)
    total = kraft_sum(code)
    boundary = total == 1
    if boundary:
        logger.warning(
            f"Kraft sum of the table is exactly 1: no other program can ever halt, "
            f"so this machine runs only its {len(keys)} listed programs"
        )
    return TableValidation(
        program_count=len(keys),
        max_length=max(len(key) for key in keys),
        kraft_sum=total,
        boundary=boundary,
    )


def build_machine(spec: MachineSpec, max_bits: Optional[int] = None) -> Machine:
    """Instantiate the runtime machine for a validated spec."""
    if isinstance(spec, TableMachineSpec):
        return TableMachine(spec, max_bits)
    return UniversalMachine(spec)


def run(machine: Machine, program: BitString, config: ExecConfig) -> RunOutcome:
    """Run one program; module-level so process pools can pickle it."""
    return machine.run(program, config)

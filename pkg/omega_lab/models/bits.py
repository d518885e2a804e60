"""
Value types for bit sequences and exact dyadic arithmetic.
All instances are immutable and safe to share between threads and processes.
"""

import re
from functools import total_ordering
from typing import Any, Iterable, Iterator, Optional, Tuple, Union

from bitarray import frozenbitarray
from bitarray.util import ba2int, int2ba
from pydantic import GetCoreSchemaHandler
from pydantic_core import core_schema

from omega_lab.errors import DuplicateMemberError, InputError, OutOfRangeError, PrefixViolationError

_BITS_PATTERN = re.compile(r"[01]*")
_DYADIC_PATTERN = re.compile(r"\s*(\d+)\s*/\s*2\^(\d+)\s*")


@total_ordering
class BitString:
    """
    A finite sequence of bits, most significant first.

    Ordering is length-lexicographic: shorter strings first, equal lengths
    compared digit by digit with 0 < 1.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: Union[str, Iterable[int], frozenbitarray] = ""):
        if isinstance(bits, frozenbitarray):
            self._bits = bits
        elif isinstance(bits, str):
            if not _BITS_PATTERN.fullmatch(bits):
                raise InputError(f"Not a bitstring: {bits!r}")
            self._bits = frozenbitarray(bits, endian="big")
        else:
            self._bits = frozenbitarray(list(bits), endian="big")

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitString":
        """Fixed-width big-endian encoding of `value`."""
        if length == 0:
            return cls()
        return cls(frozenbitarray(int2ba(value, length=length, endian="big")))

    @classmethod
    def from_index(cls, index: int) -> "BitString":
        """Inverse of `index`: the string at position `index` in length-lex order."""
        if index < 0:
            raise InputError(f"Index must be nonnegative, got {index}")
        length = (index + 1).bit_length() - 1
        return cls.from_int(index - ((1 << length) - 1), length)

    @property
    def index(self) -> int:
        """Rank in length-lex order: empty -> 0, "0" -> 1, "1" -> 2, "00" -> 3."""
        return (1 << len(self)) - 1 + self.to_int()

    def to_int(self) -> int:
        return ba2int(self._bits) if len(self._bits) else 0

    def to01(self) -> str:
        return self._bits.to01()

    def is_prefix_of(self, other: "BitString") -> bool:
        n = len(self._bits)
        return n <= len(other._bits) and other._bits[:n] == self._bits

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self._bits)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return BitString(frozenbitarray(self._bits[item]))
        return self._bits[item]

    def __add__(self, other: "BitString") -> "BitString":
        if not isinstance(other, BitString):
            return NotImplemented
        return BitString(frozenbitarray(self._bits + other._bits))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self._bits == other._bits

    def __lt__(self, other: "BitString") -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        if len(self._bits) != len(other._bits):
            return len(self._bits) < len(other._bits)
        return self._bits < other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __bool__(self) -> bool:
        return len(self._bits) > 0

    def __str__(self) -> str:
        return self._bits.to01()

    def __repr__(self) -> str:
        return f"BitString('{self._bits.to01()}')"

    def __reduce__(self):
        return (BitString, (self._bits.to01(),))

    @classmethod
    def _coerce(cls, value: Any) -> "BitString":
        if isinstance(value, BitString):
            return value
        if isinstance(value, str):
            return cls(value)
        raise ValueError("expected a string of 0/1 digits")

    @classmethod
    def __get_pydantic_core_schema__(cls, source_type: Any, handler: GetCoreSchemaHandler) -> core_schema.CoreSchema:
        return core_schema.no_info_plain_validator_function(
            cls._coerce,
            serialization=core_schema.plain_serializer_function_ser_schema(str),
        )


@total_ordering
class DyadicRational:
    """
    Exact nonnegative rational numerator / 2^scale.

    Canonical form: the numerator is odd unless the scale is 0, and zero is 0/2^0,
    so equal values are structurally equal.
    """

    __slots__ = ("numerator", "scale")

    def __init__(self, numerator: int = 0, scale: int = 0):
        if numerator < 0 or scale < 0:
            raise OutOfRangeError(f"Dyadic rationals are nonnegative with nonnegative scale, got {numerator}/2^{scale}")
        if numerator == 0:
            scale = 0
        elif scale:
            shift = min((numerator & -numerator).bit_length() - 1, scale)
            numerator >>= shift
            scale -= shift
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "scale", scale)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("DyadicRational is immutable")

    @classmethod
    def weight(cls, length: int) -> "DyadicRational":
        """1/2^length: the probability of one particular `length`-bit program."""
        return cls(1, length)

    @classmethod
    def from_bits(cls, bits: BitString) -> "DyadicRational":
        """The value of the binary fraction .b1 b2 ... bn."""
        return cls(bits.to_int(), len(bits))

    @classmethod
    def parse(cls, text: str) -> "DyadicRational":
        match = _DYADIC_PATTERN.fullmatch(text)
        if match is None:
            raise InputError(f"Not a dyadic rational (expected n/2^s): {text!r}")
        return cls(int(match.group(1)), int(match.group(2)))

    @property
    def integer_part(self) -> int:
        return self.numerator >> self.scale

    def fraction_bits(self, digits: int) -> BitString:
        """First `digits` bits after the binary point; the expansion terminates, so it is zero-padded."""
        fraction = self.numerator - (self.integer_part << self.scale)
        if digits >= self.scale:
            value = fraction << (digits - self.scale)
        else:
            value = fraction >> (self.scale - digits)
        return BitString.from_int(value, digits)

    def to_binary(self, digits: int = 0) -> str:
        width = max(digits, self.scale, 1)
        return f"{self.integer_part}.{self.fraction_bits(width)}"

    def _aligned(self, other: "DyadicRational") -> Tuple[int, int, int]:
        scale = max(self.scale, other.scale)
        return (
            self.numerator << (scale - self.scale),
            other.numerator << (scale - other.scale),
            scale,
        )

    def __add__(self, other: Union["DyadicRational", int]) -> "DyadicRational":
        if isinstance(other, int) and not isinstance(other, bool):
            other = DyadicRational(other)
        if not isinstance(other, DyadicRational):
            return NotImplemented
        left, right, scale = self._aligned(other)
        return DyadicRational(left + right, scale)

    __radd__ = __add__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            other = DyadicRational(other)
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return self.numerator == other.numerator and self.scale == other.scale

    def __lt__(self, other: Union["DyadicRational", int]) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            other = DyadicRational(other)
        if not isinstance(other, DyadicRational):
            return NotImplemented
        left, right, _ = self._aligned(other)
        return left < right

    def __hash__(self) -> int:
        # integers compare equal at scale 0
        if self.scale == 0:
            return hash(self.numerator)
        return hash((self.numerator, self.scale))

    def __bool__(self) -> bool:
        return self.numerator != 0

    def __str__(self) -> str:
        return f"{self.numerator}/2^{self.scale}"

    def __repr__(self) -> str:
        return f"DyadicRational({self.numerator}, {self.scale})"

    def __reduce__(self):
        return (DyadicRational, (self.numerator, self.scale))

    @classmethod
    def _coerce(cls, value: Any) -> "DyadicRational":
        if isinstance(value, DyadicRational):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, int) and not isinstance(value, bool):
            return cls(value)
        raise ValueError("expected a dyadic rational written n/2^s")

    @classmethod
    def __get_pydantic_core_schema__(cls, source_type: Any, handler: GetCoreSchemaHandler) -> core_schema.CoreSchema:
        return core_schema.no_info_plain_validator_function(
            cls._coerce,
            serialization=core_schema.plain_serializer_function_ser_schema(str),
        )


def least_prefix_pair(members: Iterable[BitString]) -> Optional[Tuple[BitString, BitString]]:
    """
    Find the length-lex-least pair (p, q) with p a proper prefix of q.

    Raises:
        DuplicateMemberError: If a member occurs twice
    """
    seen = set()
    for member in members:
        if member in seen:
            raise DuplicateMemberError(member)
        seen.add(member)

    best: Optional[Tuple[BitString, BitString]] = None
    for q in seen:
        for length in range(len(q)):
            p = q[:length]
            if p in seen and (best is None or (p, q) < best):
                best = (p, q)
                break
    return best


class PrefixCode:
    """A finite set of bitstrings in which no member is a proper prefix of another."""

    __slots__ = ("members",)

    def __init__(self, members: Iterable[BitString]):
        members = list(members)
        witness = least_prefix_pair(members)
        if witness is not None:
            raise PrefixViolationError(witness)
        self.members: Tuple[BitString, ...] = tuple(sorted(members))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[BitString]:
        return iter(self.members)

    def __contains__(self, item: object) -> bool:
        return item in self.members


def iter_bitstrings(max_length: int, min_length: int = 0) -> Iterator[BitString]:
    """All bitstrings with lengths in [min_length, max_length], in length-lex order."""
    for length in range(min_length, max_length + 1):
        for value in range(1 << length):
            yield BitString.from_int(value, length)

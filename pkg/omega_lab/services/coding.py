"""
Operations on bitstrings: prefix-freeness, Kraft sums, dyadic arithmetic,
the Elias gamma length code and the length-lex bitstring/integer bijection.
"""

import logging
from typing import Collection, Iterable, Iterator, Optional, Tuple, Union

from omega_lab.config import settings
from omega_lab.errors import ConfigurationError, OutOfRangeError, TruncationError
from omega_lab.models.bits import BitString, DyadicRational, PrefixCode, least_prefix_pair
from omega_lab.models.schema import KraftContribution, KraftReport, PrefixVerdict

logger = logging.getLogger(__name__)


def require_within_bound(bits: BitString, max_bits: Optional[int] = None) -> BitString:
    """
    Check a bitstring against the configured length bound.

    Raises:
        ConfigurationError: If the string is longer than the bound
    """
    limit = settings.MAX_BITS if max_bits is None else max_bits
    if len(bits) > limit:
        raise ConfigurationError(f"Bitstring of length {len(bits)} exceeds the {limit}-bit bound")
    return bits


def is_prefix_free(members: Collection[BitString], max_bits: Optional[int] = None) -> PrefixVerdict:
    """
    Check that no member is a proper prefix of another.

    Args:
        members: Candidate code words
        max_bits: Length bound (defaults to the configured one)

    Returns:
        Verdict with the length-lex-least witness pair on violation

    Raises:
        DuplicateMemberError: If a member occurs twice
        ConfigurationError: If a member exceeds the length bound
    """
    for member in members:
        require_within_bound(member, max_bits)
    witness = least_prefix_pair(members)
    return PrefixVerdict(ok=witness is None, witness=witness)


def kraft_sum(code: Union[PrefixCode, Iterable[BitString]]) -> DyadicRational:
    """
    Exact sum of 1/2^|member| over a prefix-free code.

    Raises:
        PrefixViolationError: If the members are not prefix-free
    """
    if not isinstance(code, PrefixCode):
        code = PrefixCode(code)
    total = sum((DyadicRational.weight(len(member)) for member in code), DyadicRational())
    assert total <= 1, f"Kraft inequality violated by a prefix-free code: {total}"
    return total


def kraft_report(members: Iterable[BitString], max_bits: Optional[int] = None) -> KraftReport:
    """
    Kraft sum of a prefix-free code together with each member's 1/2^|p| contribution.

    Raises:
        PrefixViolationError: If the members are not prefix-free
        DuplicateMemberError: If a member occurs twice
        ConfigurationError: If a member exceeds the length bound
    """
    members = [require_within_bound(member, max_bits) for member in members]
    code = PrefixCode(members)
    total = kraft_sum(code)
    return KraftReport(
        members=len(code),
        kraft_sum=total,
        complete=total == 1,
        contributions=[
            KraftContribution(program=member, length=len(member), weight=DyadicRational.weight(len(member)))
            for member in code
        ],
    )


def dyadic_add(a: DyadicRational, b: DyadicRational) -> DyadicRational:
    return a + b


def binary_expansion(d: DyadicRational, n: int) -> BitString:
    """
    First `n` bits after the binary point of `d`.

    Raises:
        OutOfRangeError: If `d` is not in [0, 1)
    """
    if not d < 1:
        raise OutOfRangeError(f"Binary expansion needs 0 <= d < 1, got {d}")
    if n < 0:
        raise OutOfRangeError(f"Bit count must be nonnegative, got {n}")
    return d.fraction_bits(n)


def gamma_length(n: int) -> int:
    return 2 * (n.bit_length() - 1) + 1


def gamma_encode(n: int) -> BitString:
    """
    Elias gamma code: floor(log2 n) zeros, then n in binary.

    Raises:
        OutOfRangeError: If n < 1
    """
    if n < 1:
        raise OutOfRangeError(f"Gamma code needs a positive integer, got {n}")
    width = n.bit_length()
    return BitString.from_int(0, width - 1) + BitString.from_int(n, width)


def gamma_decode(source: Iterator[int]) -> Tuple[int, int]:
    """
    Read one gamma codeword from a bit source.

    Args:
        source: Iterator yielding bits on demand

    Returns:
        The decoded integer and the number of bits consumed

    Raises:
        TruncationError: If the source runs dry mid-codeword
    """
    zeros = 0
    for bit in source:
        if bit:
            break
        zeros += 1
    else:
        raise TruncationError("truncated gamma codeword: no terminating 1 bit")

    value = 1
    for _ in range(zeros):
        bit = next(source, None)
        if bit is None:
            raise TruncationError(f"truncated gamma codeword: expected {zeros} more bits")
        value = (value << 1) | bit
    return value, 2 * zeros + 1


class BitReader:
    """Sequential reader over a bitstring, most significant bit first."""

    def __init__(self, bits: BitString):
        self._bits = bits
        self.position = 0

    def __iter__(self) -> "BitReader":
        return self

    def __next__(self) -> int:
        if self.position >= len(self._bits):
            raise StopIteration
        bit = self._bits[self.position]
        self.position += 1
        return bit

    @property
    def remaining(self) -> int:
        return len(self._bits) - self.position

    def read_uint(self, width: int) -> int:
        """
        Read a `width`-bit unsigned integer.

        Raises:
            TruncationError: If fewer than `width` bits remain
        """
        if width > self.remaining:
            raise TruncationError(f"expected {width} bits, {self.remaining} remain")
        value = self._bits[self.position:self.position + width].to_int()
        self.position += width
        return value


def integer_of_bitstring(s: BitString) -> int:
    return s.index


def bitstring_of_integer(i: int, max_bits: Optional[int] = None) -> BitString:
    """
    The string ranked `i` in length-lex order.

    Raises:
        OutOfRangeError: If i is negative
        ConfigurationError: If the string would exceed the length bound
    """
    if i < 0:
        raise OutOfRangeError(f"Index must be nonnegative, got {i}")
    return require_within_bound(BitString.from_index(i), max_bits)


def count_bitstrings(max_length: int, min_length: int = 1) -> int:
    return (1 << (max_length + 1)) - (1 << min_length)

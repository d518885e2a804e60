"""
Unit tests for bitstrings, dyadic arithmetic, prefix codes and the gamma code.
"""

import random

import pytest

from omega_lab.errors import (
    ConfigurationError, DuplicateMemberError, InputError, OutOfRangeError, PrefixViolationError, TruncationError,
)
from omega_lab.models.bits import BitString, DyadicRational, PrefixCode, iter_bitstrings
from omega_lab.services.coding import (
    BitReader, binary_expansion, bitstring_of_integer, count_bitstrings, dyadic_add, gamma_decode, gamma_encode,
    gamma_length, integer_of_bitstring, is_prefix_free, kraft_report, kraft_sum, require_within_bound,
)


def bs(*members):
    return [BitString(member) for member in members]


class TestBitString:
    """Test suite for the BitString value type."""

    def test_length_lex_order(self):
        ordered = bs("", "0", "1", "00", "01", "10", "11", "000")
        assert sorted(reversed(ordered)) == ordered
        assert BitString("1") < BitString("00")

    def test_index_of_first_strings(self):
        assert [integer_of_bitstring(s) for s in bs("", "0", "1", "00", "01", "10", "11", "000")] == list(range(8))

    def test_index_roundtrip(self):
        rng = random.Random(7)
        for _ in range(200):
            length = rng.randint(0, 64)
            s = BitString([rng.randint(0, 1) for _ in range(length)])
            assert bitstring_of_integer(integer_of_bitstring(s)) == s

    def test_index_enumerates_in_order(self):
        for i, s in enumerate(iter_bitstrings(5)):
            assert s.index == i
            assert BitString.from_index(i) == s

    def test_index_bijection_up_to_seventeen_bits(self):
        previous = None
        for i in range(1 << 17):
            s = bitstring_of_integer(i)
            assert integer_of_bitstring(s) == i
            assert previous is None or previous < s
            previous = s

    def test_negative_index_rejected(self):
        with pytest.raises(OutOfRangeError):
            bitstring_of_integer(-1)

    def test_index_beyond_length_bound(self):
        with pytest.raises(ConfigurationError):
            bitstring_of_integer(2 ** 8, max_bits=7)

    def test_rejects_non_binary_text(self):
        with pytest.raises(InputError):
            BitString("012")

    def test_length_bound(self):
        require_within_bound(BitString("1" * 64))
        with pytest.raises(ConfigurationError):
            require_within_bound(BitString("1" * 65))

    def test_slicing_and_concatenation(self):
        s = BitString("000110")
        assert s[:3] == BitString("000")
        assert s[3:] + s[:3] == BitString("110000")
        assert s[3] == 1

    def test_count_bitstrings(self):
        assert count_bitstrings(3) == 14
        assert count_bitstrings(3, min_length=0) == 15
        assert sum(1 for _ in iter_bitstrings(3, min_length=1)) == 14


class TestDyadicRational:
    """Test suite for exact dyadic arithmetic."""

    def test_carry_propagation(self):
        assert dyadic_add(DyadicRational(1, 6), DyadicRational(1, 6)) == DyadicRational(1, 5)

    def test_worked_example_sum(self):
        omega = DyadicRational(1, 4) + DyadicRational(1, 6) + DyadicRational(1, 6)
        assert omega == DyadicRational(3, 5)
        assert str(omega) == "3/2^5"
        assert binary_expansion(omega, 6) == BitString("000110")
        assert omega.to_binary(6) == "0.000110"

    def test_canonical_form(self):
        assert DyadicRational(4, 3) == DyadicRational(1, 1)
        assert (DyadicRational(4, 3).numerator, DyadicRational(4, 3).scale) == (1, 1)
        assert DyadicRational(0, 9) == DyadicRational()
        assert str(DyadicRational(1, 1) + DyadicRational(1, 1)) == "1/2^0"

    def test_parse(self):
        assert DyadicRational.parse("3/2^5") == DyadicRational(3, 5)
        assert DyadicRational.parse(str(DyadicRational(5, 9))) == DyadicRational(5, 9)
        with pytest.raises(InputError):
            DyadicRational.parse("0.09375")

    def test_order_and_sum(self):
        assert DyadicRational(1, 4) < DyadicRational(3, 5) < 1
        assert sum([DyadicRational(1, 2), DyadicRational(1, 2)]) == 1

    def test_negative_rejected(self):
        with pytest.raises(OutOfRangeError):
            DyadicRational(-1, 2)

    def test_hash_agrees_with_equality(self):
        assert DyadicRational(4, 2) == 1
        assert len({1, DyadicRational(1, 0)}) == 1
        assert {DyadicRational(3, 5): "omega"}[DyadicRational(6, 6)] == "omega"

    def test_add_matches_integer_arithmetic(self):
        rng = random.Random(3)
        for _ in range(10_000):
            a_num, a_scale = rng.randrange(1 << 40), rng.randrange(48)
            b_num, b_scale = rng.randrange(1 << 40), rng.randrange(48)
            total = dyadic_add(DyadicRational(a_num, a_scale), DyadicRational(b_num, b_scale))
            # n1/2^s1 + n2/2^s2 == n/2^s  <=>  n * 2^(s1+s2) == (n1 * 2^s2 + n2 * 2^s1) * 2^s
            assert total.numerator << (a_scale + b_scale) == ((a_num << b_scale) + (b_num << a_scale)) << total.scale
            assert total == dyadic_add(DyadicRational(b_num, b_scale), DyadicRational(a_num, a_scale))

    def test_binary_expansion_recovers_value(self):
        rng = random.Random(5)
        for _ in range(1000):
            scale = rng.randrange(40)
            d = DyadicRational(rng.randrange(1 << scale), scale)
            digits = d.scale + rng.randrange(8)
            assert DyadicRational.from_bits(binary_expansion(d, digits)) == d

    def test_binary_expansion_needs_value_below_one(self):
        with pytest.raises(OutOfRangeError):
            binary_expansion(DyadicRational(1), 3)

    def test_binary_expansion_zero_pads(self):
        assert binary_expansion(DyadicRational(1, 2), 5) == BitString("01000")
        assert binary_expansion(DyadicRational(3, 5), 3) == BitString("000")


class TestPrefixCodes:
    """Test suite for prefix-freeness and Kraft sums."""

    def test_prefix_free_code(self):
        verdict = is_prefix_free(bs("0001", "000001", "000011"))
        assert verdict.ok
        assert verdict.witness is None

    def test_violation_witness(self):
        verdict = is_prefix_free(bs("0", "01"))
        assert not verdict.ok
        assert verdict.witness == (BitString("0"), BitString("01"))

    def test_least_witness_is_reported(self):
        verdict = is_prefix_free(bs("1", "10", "0", "011", "01"))
        assert verdict.witness == (BitString("0"), BitString("01"))

    def test_empty_string_is_prefix_of_everything(self):
        verdict = is_prefix_free(bs("", "1"))
        assert verdict.witness == (BitString(""), BitString("1"))

    def test_duplicate_member(self):
        with pytest.raises(DuplicateMemberError):
            is_prefix_free(bs("01", "01"))

    def test_prefix_code_rejects_violation(self):
        with pytest.raises(PrefixViolationError) as exc:
            PrefixCode(bs("0", "01"))
        assert "(0, 01)" in str(exc.value)

    def test_kraft_sum_boundary(self):
        assert kraft_sum(bs("0", "1")) == 1

    def test_kraft_inequality_on_random_codes(self):
        rng = random.Random(11)
        for _ in range(100):
            members = []
            for _ in range(rng.randint(1, 10)):
                candidate = BitString([rng.randint(0, 1) for _ in range(rng.randint(1, 12))])
                if not any(m.is_prefix_of(candidate) or candidate.is_prefix_of(m) for m in members):
                    members.append(candidate)
            assert kraft_sum(members) <= 1

    def test_kraft_equality_only_for_complete_codes(self):
        """Sum 1 exactly when no string up to the longest member length can join the code."""
        rng = random.Random(13)
        for _ in range(200):
            # split random leaves of the full binary tree, then maybe drop some
            leaves = [BitString("0"), BitString("1")]
            for _ in range(rng.randint(0, 8)):
                leaf = leaves.pop(rng.randrange(len(leaves)))
                if len(leaf) < 6:
                    leaves.extend([leaf + BitString("0"), leaf + BitString("1")])
                else:
                    leaves.append(leaf)
            if rng.random() < 0.5 and len(leaves) > 1:
                leaves.pop(rng.randrange(len(leaves)))
            longest = max(len(leaf) for leaf in leaves)
            extendable = any(
                not any(leaf.is_prefix_of(w) or w.is_prefix_of(leaf) for leaf in leaves)
                for w in iter_bitstrings(longest, min_length=1)
            )
            assert (kraft_sum(leaves) == 1) == (not extendable)

    def test_kraft_report_contributions(self):
        report = kraft_report(bs("11", "0", "10"))
        assert report.members == 3
        assert report.complete
        assert [str(entry.program) for entry in report.contributions] == ["0", "10", "11"]
        assert [str(entry.weight) for entry in report.contributions] == ["1/2^1", "1/2^2", "1/2^2"]


class TestGammaCode:
    """Test suite for the self-delimiting length code."""

    def test_known_codewords(self):
        assert gamma_encode(1) == BitString("1")
        assert gamma_encode(2) == BitString("010")
        assert gamma_encode(5) == BitString("00101")
        assert len(gamma_encode(8)) == gamma_length(8) == 7

    def test_decode_reports_bits_consumed(self):
        for n in range(1, 300):
            code = gamma_encode(n)
            reader = BitReader(code + BitString("111"))
            assert gamma_decode(reader) == (n, len(code))
            assert reader.remaining == 3

    def test_codewords_are_prefix_free(self):
        codewords = [gamma_encode(n) for n in range(1, 1001)]
        assert is_prefix_free(codewords).ok
        for m in (1, 2, 3, 7, 8, 500):
            assert not any(codewords[m - 1].is_prefix_of(codewords[n - 1]) for n in range(m + 1, 1001))

    def test_truncated_codeword(self):
        with pytest.raises(TruncationError):
            gamma_decode(BitReader(BitString("000")))
        with pytest.raises(TruncationError):
            gamma_decode(BitReader(BitString("001")))

    def test_encode_needs_positive(self):
        with pytest.raises(OutOfRangeError):
            gamma_encode(0)

    def test_read_uint(self):
        reader = BitReader(BitString("101110"))
        assert reader.read_uint(3) == 5
        assert reader.read_uint(3) == 6
        with pytest.raises(TruncationError):
            reader.read_uint(1)

import numpy as np
import pytest

from localcodes.api import CorrectFailure, CorruptionChannel, QueryCountingOracle, RANDOM_SYMBOLS
from localcodes.gf import BinaryField
from localcodes.multiplicity import MultiplicityCode, graded_exponents
from localcodes.rs import ReedSolomonCode

F8 = BinaryField(3)
F16 = BinaryField(4)
F32 = BinaryField(5)
F64 = BinaryField(6)


class TestLayout:
    def test_graded_lex_order(self):
        assert graded_exponents(2, 1) == [(0, 0), (0, 1), (1, 0)]
        exps = graded_exponents(2, 3)
        totals = [sum(e) for e in exps]
        assert totals == sorted(totals)

    def test_dimensions(self):
        code = MultiplicityCode(F16, m=2, s=2, d=5)
        assert code.num_derivs == 3
        assert code.dimension == 21
        assert code.block_length == 256

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            MultiplicityCode(F16, m=0, s=1, d=3)
        with pytest.raises(ValueError):
            MultiplicityCode(F16, m=1, s=1, d=16)  # d >= s*q kills the distance


class TestEncode:
    def test_order_one_single_variable_is_reed_solomon(self):
        # identical linear maps: basis vectors agree, hence all inputs agree
        for field, d in ((F8, 2), (F16, 3)):
            mc = MultiplicityCode(field, m=1, s=1, d=d)
            rs = ReedSolomonCode(field, field.order, d + 1)
            for i in range(d + 1):
                basis = np.zeros(d + 1, dtype=np.int64)
                basis[i] = 1
                assert np.array_equal(mc.encode(basis)[:, 0], rs.encode(basis))
            rng = np.random.default_rng(0)
            for _ in range(25):
                msg = field.random_elements(rng, d + 1)
                assert np.array_equal(mc.encode(msg)[:, 0], rs.encode(msg))

    def test_constant_polynomial(self):
        code = MultiplicityCode(F16, m=2, s=2, d=4)
        word = code.encode_poly({(0, 0): 9})
        assert (word[:, 0] == 9).all()
        assert not word[:, 1:].any()

    def test_product_of_variables_at_origin(self):
        code = MultiplicityCode(F16, m=2, s=2, d=4)
        word = code.encode_poly({(1, 1): 1})
        origin = code.index_of_point((0, 0))
        assert not word[origin].any()

    def test_degree_cap(self):
        code = MultiplicityCode(F16, m=2, s=2, d=4)
        with pytest.raises(ValueError):
            code.encode_poly({(3, 2): 1})

    def test_rate_identity_and_lower_bound(self):
        from fractions import Fraction
        from math import comb

        for field, m, s, d in ((F16, 2, 2, 20), (F64, 2, 2, 96), (F32, 2, 1, 20)):
            code = MultiplicityCode(field, m, s, d)
            q = field.order
            assert code.rate == Fraction(comb(d + m, m), comb(s + m - 1, m) * q**m)
            assert code.rate >= code.rate_lower_bound()

    def test_weight_meets_distance_bound(self):
        code = MultiplicityCode(F16, m=2, s=2, d=20)
        bound = float(code.distance_lower_bound) * code.block_length
        rng = np.random.default_rng(1)
        violations = 0
        for _ in range(10_000):
            msg = code.random_message(rng)
            if not msg.any():
                continue
            word = code.encode(msg)
            if int((word != 0).any(axis=1).sum()) < bound:
                violations += 1
        assert violations == 0

    def test_symbol_and_codeword_bytes_roundtrip(self):
        code = MultiplicityCode(F16, m=2, s=2, d=4)
        rng = np.random.default_rng(12)
        word = code.encode(code.random_message(rng))
        assert len(code.symbol_to_bytes(word[0])) == code.num_derivs
        assert np.array_equal(code.codeword_from_bytes(code.codeword_to_bytes(word)), word)


class TestLineRestriction:
    def test_clean_restriction_is_a_line_codeword(self):
        code = MultiplicityCode(F16, m=2, s=2, d=6)
        rng = np.random.default_rng(2)
        word = code.encode(code.random_message(rng))
        oracle = QueryCountingOracle(word)
        line = code.restrict_to_line(oracle, (3, 7), (1, 5))
        assert oracle.count == code.q
        poly = code.decode_line(line)
        assert poly is not None and poly.degree <= code.d

    def test_xy_along_diagonal(self):
        code = MultiplicityCode(F16, m=2, s=2, d=4)
        word = code.encode_poly({(1, 1): 1})
        oracle = QueryCountingOracle(word)
        line = code.restrict_to_line(oracle, (0, 0), (1, 1))
        assert tuple(line[0]) == (0, 0)  # value and first derivative at t = 0
        poly = code.decode_line(line)
        assert poly.coeffs == (0, 0, 1)  # t^2

    def test_order_one_restriction_is_plain_evaluation(self):
        code = MultiplicityCode(F32, m=2, s=1, d=6)
        rng = np.random.default_rng(3)
        msg = code.random_message(rng)
        word = code.encode(msg)
        oracle = QueryCountingOracle(word)
        a, b = (2, 3), (1, 4)
        line = code.restrict_to_line(oracle, a, b)
        idx = code.line_indices(a, b)
        assert np.array_equal(line[:, 0], word[idx, 0])

    def test_zero_direction_rejected(self):
        code = MultiplicityCode(F16, m=2, s=1, d=3)
        oracle = QueryCountingOracle(code.encode(np.zeros(code.dimension, dtype=np.int64)))
        with pytest.raises(ValueError):
            code.restrict_to_line(oracle, (0, 0), (0, 0))


class TestLineDecoding:
    def test_recovers_from_radius_errors(self):
        code = MultiplicityCode(F64, m=2, s=2, d=96)
        rng = np.random.default_rng(4)
        word = code.encode(code.random_message(rng))
        oracle = QueryCountingOracle(word)
        line = code.restrict_to_line(oracle, (0, 0), (1, 1))
        truth = code.decode_line(line)
        corrupted = line.copy()
        for t in rng.choice(code.q, size=3, replace=False):
            corrupted[t] ^= rng.integers(1, code.q, size=code.s)
        assert code.decode_line(corrupted) == truth

    def test_garbage_fails(self):
        code = MultiplicityCode(F16, m=2, s=2, d=20)
        rng = np.random.default_rng(5)
        garbage = rng.integers(0, 16, size=(code.q, 2))
        assert code.decode_line(garbage) is None


class TestLocalCorrection:
    def test_clean_oracle_always_correct(self):
        code = MultiplicityCode(F64, m=2, s=2, d=96)
        rng = np.random.default_rng(6)
        word = code.encode(code.random_message(rng))
        oracle = QueryCountingOracle(word)
        for _ in range(5):
            i = int(rng.integers(0, code.block_length))
            assert np.array_equal(code.local_correct(oracle, i, rng), word[i])

    def test_contract_error_rate_statistics(self):
        code = MultiplicityCode(F64, m=2, s=2, d=96)
        ok = 0
        trials = 40
        for t in range(trials):
            rng = np.random.default_rng([10, t])
            word = code.encode(code.random_message(rng))
            channel = CorruptionChannel(RANDOM_SYMBOLS, float(code.correct_radius), seed=50 + t)
            corrupted, _, _ = channel.apply(word, code)
            oracle = QueryCountingOracle(corrupted)
            i = int(rng.integers(0, code.block_length))
            try:
                ok += bool(np.array_equal(code.local_correct(oracle, i, rng), word[i]))
            except CorrectFailure:
                pass
            assert oracle.count <= code.query_budget_correct
        assert ok / trials >= 2 / 3

    def test_corruption_on_one_line_missing_the_target(self):
        code = MultiplicityCode(F64, m=2, s=2, d=96)
        ok = 0
        trials = 40
        for t in range(trials):
            rng = np.random.default_rng([11, t])
            word = code.encode(code.random_message(rng))
            corrupted = word.copy()
            hostile = code.line_indices((1, 1), (1, 3))
            corrupted[hostile] = rng.integers(0, code.q, size=(code.q, code.num_derivs))
            target = code.index_of_point((0, 0))
            assert target not in set(int(x) for x in hostile)
            oracle = QueryCountingOracle(corrupted)
            try:
                ok += bool(np.array_equal(code.local_correct(oracle, target, rng), word[target]))
            except CorrectFailure:
                pass
        assert ok / trials >= 2 / 3

    def test_field_condition_gate(self):
        code = MultiplicityCode(F8, m=2, s=2, d=4)
        assert not code.field_condition_ok
        oracle = QueryCountingOracle(code.encode(np.zeros(code.dimension, dtype=np.int64)))
        with pytest.raises(ValueError):
            code.local_correct(oracle, 0, np.random.default_rng(0))

    def test_exact_query_count_without_cache(self):
        code = MultiplicityCode(F32, m=2, s=1, d=20)
        rng = np.random.default_rng(7)
        word = code.encode(code.random_message(rng))
        oracle = QueryCountingOracle(word)
        code.local_correct(oracle, 5, rng)
        assert oracle.count == code.num_directions * code.q


class TestSystematic:
    def test_readback_is_identity(self):
        code = MultiplicityCode(F32, m=2, s=1, d=8)
        slots = code.information_slots()
        assert len(slots) == code.dimension
        rng = np.random.default_rng(8)
        msg = code.random_message(rng)
        word = code.systematic_encode(msg)
        read = np.array([word[p][c] for p, c in slots])
        assert np.array_equal(read, msg)

    def test_zero_message(self):
        code = MultiplicityCode(F32, m=2, s=1, d=8)
        word = code.systematic_encode(np.zeros(code.dimension, dtype=np.int64))
        assert not word.any()

    def test_reed_solomon_case_uses_leading_points(self):
        code = MultiplicityCode(F16, m=1, s=1, d=3)
        assert code.information_slots() == [(0, 0), (1, 0), (2, 0), (3, 0)]

    def test_systematic_words_are_codewords(self):
        code = MultiplicityCode(F16, m=1, s=1, d=3)
        rs = ReedSolomonCode(F16, 16, 4)
        rng = np.random.default_rng(9)
        msg = code.random_message(rng)
        word = code.systematic_encode(msg)
        assert rs.is_codeword(word[:, 0])
        assert np.array_equal(word[:4, 0], msg)

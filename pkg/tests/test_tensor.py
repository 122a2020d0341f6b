from fractions import Fraction

import numpy as np
import pytest

from localcodes import linalg
from localcodes.api import QueryCountingOracle
from localcodes.exhaustive import EnumeratedCode, exact_rejection_probability
from localcodes.gf import BinaryField
from localcodes.rs import ReedSolomonCode
from localcodes.tensor import TensorCode

F4 = BinaryField(2)
F8 = BinaryField(3)


def small_tensor() -> TensorCode:
    return TensorCode(ReedSolomonCode(F8, 8, 4), 3)


def diagonal_flip(code: TensorCode) -> np.ndarray:
    """A corruption pattern intersecting every plane in a weight-1 line."""
    word = np.zeros(code.shape, dtype=np.int64)
    for i in range(code.ell):
        word[(i,) * code.m] ^= 1
    return word.reshape(-1, 1)


class TestEncode:
    def test_rank_one_message(self):
        code = small_tensor()
        rng = np.random.default_rng(0)
        vecs = [F8.random_elements(rng, 4) for _ in range(3)]
        msg = np.zeros((4, 4, 4), dtype=np.int64)
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    msg[i, j, k] = F8.mul(int(vecs[0][i]), F8.mul(int(vecs[1][j]), int(vecs[2][k])))
        word = code.encode_array(msg)
        assert code.is_codeword_array(word)
        # and it is the outer product of the base encodings
        enc = [code.base.encode(v) for v in vecs]
        for i in range(8):
            for j in range(8):
                for k in range(8):
                    want = F8.mul(int(enc[0][i]), F8.mul(int(enc[1][j]), int(enc[2][k])))
                    assert word[i, j, k] == want

    def test_zero_message(self):
        code = small_tensor()
        assert not code.encode(np.zeros(64, dtype=np.int64)).any()

    def test_axis_order_invariance(self):
        code = small_tensor()
        rng = np.random.default_rng(1)
        msg = code.random_message(rng).reshape(4, 4, 4)
        reference = code.encode_array(msg)
        import itertools

        for order in itertools.permutations(range(3)):
            out = msg
            for axis in order:
                out = linalg.apply_along_axis(F8, code.base._encode_matrix, out, axis)
            assert np.array_equal(out, reference)

    def test_dimension_is_k_to_the_m(self):
        code = small_tensor()
        gens = []
        for i in range(64):
            msg = np.zeros(64, dtype=np.int64)
            msg[i] = 1
            gens.append(code.encode(msg)[:, 0])
        assert linalg.rank(F8, np.stack(gens)) == 4**3

    def test_shape_validation(self):
        code = small_tensor()
        with pytest.raises(ValueError):
            code.encode_array(np.zeros((4, 4, 5), dtype=np.int64))


class TestMembership:
    def test_encoded_words_are_members(self):
        code = small_tensor()
        rng = np.random.default_rng(2)
        assert code.is_codeword(code.random_codeword(rng))

    def test_single_flip_is_not(self):
        code = small_tensor()
        rng = np.random.default_rng(3)
        word = code.random_codeword(rng)
        word[77, 0] ^= 5
        assert not code.is_codeword(word)

    def test_zero_array(self):
        code = small_tensor()
        assert code.is_codeword(np.zeros((512, 1), dtype=np.int64))

    def test_matches_per_line_base_membership(self):
        code = small_tensor()
        rng = np.random.default_rng(4)
        for _ in range(10):
            word = rng.integers(0, 8, size=(512, 1))
            arr = word.reshape(code.shape)
            by_lines = True
            for axis in range(3):
                moved = np.moveaxis(arr, axis, 0)
                for line in moved.reshape(8, -1).T:
                    if not code.base.is_codeword(line):
                        by_lines = False
                        break
                if not by_lines:
                    break
            assert code.is_codeword(word) == by_lines

    def test_array_bytes_roundtrip(self):
        code = small_tensor()
        rng = np.random.default_rng(20)
        word = code.random_codeword(rng)
        raw = code.array_to_bytes(word)
        assert np.array_equal(code.array_from_bytes(raw), word)

    def test_exhaustive_min_weight_two_dimensional(self):
        base = ReedSolomonCode(F4, 4, 2)
        code = TensorCode(base, 2)
        table = EnumeratedCode(4, 4, lambda msgs: np.stack([code.encode(m) for m in msgs]))
        assert table.min_distance() == (4 - 2 + 1) ** 2


class TestPlaneTest:
    def test_completeness(self):
        code = small_tensor()
        rng = np.random.default_rng(5)
        word = code.random_codeword(rng)
        oracle = QueryCountingOracle(word)
        assert all(code.plane_test(oracle, rng) for _ in range(500))

    def test_query_count_per_trial(self):
        code = small_tensor()
        rng = np.random.default_rng(6)
        oracle = QueryCountingOracle(code.random_codeword(rng))
        code.plane_test(oracle, rng)
        assert oracle.count == code.ell**2

    def test_every_plane_corrupted_always_rejects(self):
        code = small_tensor()
        rng = np.random.default_rng(7)
        word = code.random_codeword(rng) ^ diagonal_flip(code)
        for ax, fixed in code.plane_choices():
            idx = code.plane_indices(ax, fixed)
            plane = word[:, 0][idx.ravel()].reshape(code.ell, code.ell)
            assert not code.plane_is_valid(plane)
        oracle = QueryCountingOracle(word)
        assert not any(code.plane_test(oracle, rng) for _ in range(50))

    def test_single_flip_exact_probability(self):
        code = small_tensor()
        rng = np.random.default_rng(8)
        word = code.random_codeword(rng)
        word[code.ell**2 * 2 + code.ell * 3 + 5, 0] ^= 3
        exact = code.exact_single_trial_rejection(word)
        assert exact == Fraction(3, 24)
        hits = sum(not code.plane_test(QueryCountingOracle(word), np.random.default_rng([9, t]))
                   for t in range(2000))
        sigma = (float(exact) * (1 - float(exact)) / 2000) ** 0.5
        assert abs(hits / 2000 - float(exact)) <= 3 * sigma

    def test_exact_probability_via_generic_enumerator(self):
        code = small_tensor()
        rng = np.random.default_rng(10)
        word = code.random_codeword(rng)
        word[0, 0] ^= 1

        def decide(choice, w):
            ax, fixed = choice
            idx = code.plane_indices(ax, fixed)
            return code.plane_is_valid(w[:, 0][idx.ravel()].reshape(code.ell, code.ell))

        assert exact_rejection_probability(code.plane_choices(), decide, word) == \
            code.exact_single_trial_rejection(word)

    def test_plane_test_needs_three_dimensions(self):
        code = TensorCode(ReedSolomonCode(F4, 4, 2), 2)
        oracle = QueryCountingOracle(code.encode(np.zeros(4, dtype=np.int64)))
        with pytest.raises(ValueError):
            code.plane_test(oracle, np.random.default_rng(0))


class TestAmplifiedTest:
    def test_repetition_formula(self):
        code = TensorCode(ReedSolomonCode(F8, 8, 4), 3, rho_base=Fraction(1, 4))
        assert code.test_repetitions() == 16
        default = small_tensor()
        assert default.test_repetitions() == 4 * 4 * 3  # rho_base = 1/(4m)

    def test_amplified_completeness_and_rejection(self):
        code = small_tensor()
        rng = np.random.default_rng(11)
        word = code.random_codeword(rng)
        assert code.local_test(QueryCountingOracle(word), rng)
        word[13, 0] ^= 2
        rejected = sum(not code.local_test(QueryCountingOracle(word), np.random.default_rng([12, t]))
                       for t in range(100))
        assert rejected >= 80  # 48 reps at 1/8 per-trial rejection

    def test_monotone_rejection_light(self):
        code = small_tensor()
        from localcodes.api import CorruptionChannel, RANDOM_SYMBOLS

        rates = [0.02, 0.05, 0.1]
        example = []
        for rate in rates:
            rej = 0
            for t in range(400):
                rng = np.random.default_rng([13, t])
                word = code.random_codeword(rng)
                chan = CorruptionChannel(RANDOM_SYMBOLS, rate, seed=1000 + t)
                corrupted, _, _ = chan.apply(word, code)
                rej += not code.plane_test(QueryCountingOracle(corrupted), rng)
            example.append(rej)
        assert example == sorted(example)

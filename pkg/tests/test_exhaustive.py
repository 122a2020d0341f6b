from fractions import Fraction

import numpy as np
import pytest

from localcodes.exhaustive import EnumeratedCode, MessageSpaceTooLarge, exact_rejection_probability
from localcodes.gf import BinaryField
from localcodes.rs import ReedSolomonCode
from localcodes.tensor import TensorCode

F4 = BinaryField(2)
F8 = BinaryField(3)


def rs_table(code: ReedSolomonCode) -> EnumeratedCode:
    return EnumeratedCode(
        code.k, code.field.order,
        lambda msgs: np.stack([code.encode(m) for m in msgs])[:, :, None],
    )


class TestMinimumDistance:
    def test_reed_solomon_7_3(self):
        assert rs_table(ReedSolomonCode(F8, 7, 3)).min_distance() == 5

    def test_repetition_code(self):
        code = ReedSolomonCode(F8, 6, 1)  # constants evaluated everywhere
        assert rs_table(code).min_distance() == 6

    def test_tensor_square(self):
        code = TensorCode(ReedSolomonCode(F4, 4, 2), 2)
        table = EnumeratedCode(4, 4, lambda msgs: np.stack([code.encode(m) for m in msgs]))
        assert table.min_distance() == 9

    def test_linearity_spot_check(self):
        table = rs_table(ReedSolomonCode(F8, 7, 3))
        assert table.check_linear(np.random.default_rng(0))

    def test_cap(self):
        with pytest.raises(MessageSpaceTooLarge):
            EnumeratedCode(9, 256, lambda msgs: msgs[:, :, None])


class TestExactDistance:
    def test_codeword_distance_zero(self):
        code = ReedSolomonCode(F8, 7, 3)
        table = rs_table(code)
        word = code.encode(np.array([1, 2, 3]))
        assert table.distance_from(word[:, None]) == 0

    def test_single_flip(self):
        code = ReedSolomonCode(F8, 7, 3)
        table = rs_table(code)
        word = code.encode(np.array([1, 2, 3]))
        word[4] ^= 6
        assert table.distance_from(word[:, None]) == Fraction(1, 7)

    def test_cross_check_with_unique_decoding(self):
        code = ReedSolomonCode(F8, 7, 3)
        table = rs_table(code)
        rng = np.random.default_rng(1)
        for _ in range(40):
            word = rng.integers(0, 8, size=7)
            nearest, dist = table.nearest(word[:, None])
            decoded = code.decode_unique(word)
            if dist <= Fraction(code.unique_radius, 7):
                assert decoded is not None
                assert np.array_equal(code.encode(decoded), nearest[:, 0])
            elif decoded is not None:
                # decoding succeeded: it must have found the nearest codeword
                assert np.array_equal(code.encode(decoded), nearest[:, 0])


class TestExactRejection:
    def make(self):
        code = TensorCode(ReedSolomonCode(F4, 4, 2), 3)

        def decide(choice, word):
            ax, fixed = choice
            idx = code.plane_indices(ax, fixed)
            plane = word[:, 0][idx.ravel()].reshape(code.ell, code.ell)
            return code.plane_is_valid(plane)

        return code, decide

    def test_codeword_never_rejected(self):
        code, decide = self.make()
        word = code.random_codeword(np.random.default_rng(2))
        assert exact_rejection_probability(code.plane_choices(), decide, word) == 0

    def test_single_flip_probability(self):
        code, decide = self.make()
        word = code.random_codeword(np.random.default_rng(3))
        word[21, 0] ^= 1
        # planes through one cell: one per axis pair, out of 3 * 4 choices
        assert exact_rejection_probability(code.plane_choices(), decide, word) == Fraction(3, 12)

    def test_everywhere_corrupted_word_always_rejected(self):
        code, decide = self.make()
        word = code.random_codeword(np.random.default_rng(4))
        for i in range(code.ell):
            word[i * code.ell**2 + i * code.ell + i, 0] ^= 1  # diagonal hits every plane
        assert exact_rejection_probability(code.plane_choices(), decide, word) == 1

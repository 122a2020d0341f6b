import numpy as np
import pytest

from localcodes.exhaustive import EnumeratedCode
from localcodes.gf import BinaryField
from localcodes.rs import ERASED, ReedSolomonCode

F8 = BinaryField(3)
F16 = BinaryField(4)
F256 = BinaryField(8)

RS73 = ReedSolomonCode(F8, 7, 3)


def enumerated(code: ReedSolomonCode) -> EnumeratedCode:
    return EnumeratedCode(
        code.k, code.field.order,
        lambda msgs: np.stack([code.encode(m) for m in msgs])[:, :, None],
    )


class TestEncode:
    def test_zero_message(self):
        assert not RS73.encode(np.zeros(3, dtype=np.int64)).any()

    def test_rate_one_is_a_bijection(self):
        code = ReedSolomonCode(F8, 5, 5)
        rng = np.random.default_rng(0)
        msg = code.field.random_elements(rng, 5)
        assert np.array_equal(code.interpolate_message(code.encode(msg)), msg)

    def test_random_codeword_weight_meets_distance(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            msg = F8.random_elements(rng, 3)
            if not msg.any():
                continue
            assert np.count_nonzero(RS73.encode(msg)) >= 5

    def test_exhaustive_min_distance(self):
        assert enumerated(RS73).min_distance() == 7 - 3 + 1
        rs75 = ReedSolomonCode(F8, 7, 5)
        assert enumerated(rs75).min_distance() == 7 - 5 + 1

    def test_sampled_weights_gf16_long_code(self):
        code = ReedSolomonCode(F16, 15, 11)
        rng = np.random.default_rng(100)
        messages = rng.integers(0, 16, size=(11, 100_000), dtype=np.int64)
        messages[:, (messages != 0).sum(axis=0) == 0] = 1
        words = code.encode_batch(messages)
        weights = (words != 0).sum(axis=0)
        assert int(weights.min()) >= 15 - 11 + 1

    def test_linearity(self):
        rng = np.random.default_rng(2)
        for field, n, k in ((F8, 7, 3), (F16, 15, 11), (F256, 64, 32)):
            code = ReedSolomonCode(field, n, k)
            m1 = field.random_elements(rng, k)
            m2 = field.random_elements(rng, k)
            assert np.array_equal(code.encode(m1) ^ code.encode(m2), code.encode(m1 ^ m2))

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            ReedSolomonCode(F8, 9, 3)  # block longer than the field
        with pytest.raises(ValueError):
            ReedSolomonCode(F8, 7, 8)


class TestUniqueDecoding:
    def test_codeword_decodes_to_its_message(self):
        rng = np.random.default_rng(3)
        msg = F8.random_elements(rng, 3)
        assert np.array_equal(RS73.decode_unique(RS73.encode(msg)), msg)

    def test_single_errors_all_positions_and_values(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            msg = F8.random_elements(rng, 3)
            word = RS73.encode(msg)
            for pos in range(7):
                for err in range(1, 8):
                    received = word.copy()
                    received[pos] ^= err
                    assert np.array_equal(RS73.decode_unique(received), msg)

    def test_agrees_with_nearest_codeword_within_radius(self):
        code = ReedSolomonCode(F8, 7, 3)
        table = enumerated(code)
        rng = np.random.default_rng(5)
        for _ in range(100):
            msg = F8.random_elements(rng, 3)
            word = code.encode(msg)
            received = word.copy()
            positions = rng.choice(7, size=int(rng.integers(0, code.unique_radius + 1)),
                                   replace=False)
            for p in positions:
                received[p] ^= int(rng.integers(1, 8))
            decoded = code.decode_unique(received)
            nearest, dist = table.nearest(received[:, None])
            assert decoded is not None
            assert np.array_equal(code.encode(decoded), nearest[:, 0])

    def test_word_beyond_radius_fails(self):
        # hunt for a word at distance exactly 3 from the whole code
        table = enumerated(RS73)
        rng = np.random.default_rng(6)
        found = None
        for _ in range(500):
            word = F8.random_elements(rng, 7)
            _, dist = table.nearest(word[:, None])
            if dist.numerator / dist.denominator == 3 / 7:
                found = word
                break
        assert found is not None, "covering search failed to find a distance-3 word"
        assert RS73.decode_unique(found) is None

    def test_random_radius_errors_at_desk_scale(self):
        code = ReedSolomonCode(F256, 64, 32)
        rng = np.random.default_rng(7)
        for _ in range(50):
            msg = F256.random_elements(rng, 32)
            word = code.encode(msg)
            received = word.copy()
            for p in rng.choice(64, size=16, replace=False):
                received[p] ^= int(rng.integers(1, 256))
            assert np.array_equal(code.decode_unique(received), msg)


class TestErasureDecoding:
    def test_no_erasures(self):
        rng = np.random.default_rng(8)
        msg = F8.random_elements(rng, 3)
        assert np.array_equal(RS73.decode_erasures(RS73.encode(msg)), msg)

    def test_max_erasures(self):
        rng = np.random.default_rng(9)
        msg = F8.random_elements(rng, 3)
        word = RS73.encode(msg)
        word[1] = ERASED
        word[4] = ERASED
        word[5] = ERASED
        word[6] = ERASED
        assert np.array_equal(RS73.decode_erasures(word), msg)

    def test_too_many_erasures(self):
        rng = np.random.default_rng(10)
        word = RS73.encode(F8.random_elements(rng, 3))
        word[np.arange(5)] = ERASED
        assert RS73.decode_erasures(word) is None

    def test_inconsistent_survivors(self):
        rng = np.random.default_rng(11)
        word = RS73.encode(F8.random_elements(rng, 3))
        word[0] = ERASED
        word[3] ^= 2  # corrupted survivor
        assert RS73.decode_erasures(word) is None


class TestMembership:
    def test_codewords_accepted(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            assert RS73.is_codeword(RS73.encode(F8.random_elements(rng, 3)))

    def test_single_flip_rejected(self):
        rng = np.random.default_rng(13)
        word = RS73.encode(F8.random_elements(rng, 3))
        word[2] ^= 1
        assert not RS73.is_codeword(word)

    def test_zero_word(self):
        assert RS73.is_codeword(np.zeros(7, dtype=np.int64))


class TestSerialization:
    def test_codeword_bytes_roundtrip(self):
        rng = np.random.default_rng(14)
        code = ReedSolomonCode(F256, 12, 5)
        word = code.encode(F256.random_elements(rng, 5))
        raw = code.codeword_to_bytes(word)
        assert np.array_equal(code.codeword_from_bytes(raw), word)

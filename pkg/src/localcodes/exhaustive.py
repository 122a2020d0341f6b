"""Exhaustive ground-truth computations on tiny codes.

These are the independent oracles the tests measure the library against:
exact minimum distance by enumerating every codeword, exact distance of a
word from a code, nearest-codeword decoding, and exact tester rejection
probabilities by enumerating the tester's whole choice space.

Everything here enumerates a message space, so construction is capped at
24 bits of message entropy.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

MESSAGE_SPACE_CAP_BITS = 24


class MessageSpaceTooLarge(ValueError):
    pass


class EnumeratedCode:
    """All codewords of a small code, materialized.

    ``encode_batch`` maps a (count, k) integer message array to a
    (count, n, symbol_width) codeword array; ``alphabet_size`` is the number
    of values a message coordinate ranges over.
    """

    def __init__(
        self,
        k: int,
        alphabet_size: int,
        encode_batch: Callable[[np.ndarray], np.ndarray],
        batch: int = 4096,
    ):
        bits = k * np.log2(alphabet_size)
        if bits > MESSAGE_SPACE_CAP_BITS:
            raise MessageSpaceTooLarge(
                f"message space of {bits:.1f} bits exceeds the {MESSAGE_SPACE_CAP_BITS}-bit cap"
            )
        self.k = k
        self.alphabet_size = alphabet_size
        self.count = alphabet_size**k
        self._encode_batch = encode_batch
        self._batch = batch
        first = encode_batch(self._messages(np.arange(min(self.count, 2))))
        self.n = first.shape[1]
        self.symbol_width = first.shape[2]

    def _messages(self, indices: np.ndarray) -> np.ndarray:
        out = np.zeros((len(indices), self.k), dtype=np.int64)
        rem = indices.astype(np.int64)
        for pos in range(self.k):
            out[:, pos] = rem % self.alphabet_size
            rem //= self.alphabet_size
        return out

    def batches(self) -> Iterable[tuple[np.ndarray, np.ndarray]]:
        for start in range(0, self.count, self._batch):
            idx = np.arange(start, min(start + self._batch, self.count))
            yield idx, self._encode_batch(self._messages(idx))

    @staticmethod
    def _weights(words: np.ndarray) -> np.ndarray:
        return (words != 0).any(axis=2).sum(axis=1)

    def min_distance(self) -> int:
        """Minimum nonzero codeword weight (assumes linearity; verified separately)."""
        best = self.n + 1
        for idx, words in self.batches():
            w = self._weights(words)[idx != 0]
            if w.size:
                best = min(best, int(w.min()))
        return best

    def check_linear(self, rng: np.random.Generator, trials: int = 50) -> bool:
        """Spot-check closure under addition (XOR of symbol values)."""
        for _ in range(trials):
            i, j = rng.integers(0, self.count, 2)
            mi, mj = self._messages(np.array([i, j]))
            wi, wj = self._encode_batch(np.stack([mi, mj]))
            target = wi ^ wj
            msum = self._xor_messages(mi, mj)
            wsum = self._encode_batch(msum[None, :])[0]
            if not np.array_equal(wsum, target):
                return False
        return True

    def _xor_messages(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # message coordinates are field elements encoded as ints, so XOR adds
        return a ^ b

    def distance_from(self, word: np.ndarray) -> Fraction:
        """Exact relative Hamming distance of ``word`` from the code."""
        _, best = self.nearest(word)
        return best

    def nearest(self, word: np.ndarray) -> tuple[np.ndarray, Fraction]:
        word = np.asarray(word, dtype=np.int64).reshape(1, self.n, self.symbol_width)
        best_d = self.n + 1
        best_w = None
        for _, words in self.batches():
            dists = (words != word).any(axis=2).sum(axis=1)
            a = int(dists.argmin())
            if int(dists[a]) < best_d:
                best_d = int(dists[a])
                best_w = words[a].copy()
        return best_w, Fraction(best_d, self.n)


def exact_rejection_probability(choices, decide, word) -> Fraction:
    """Exact single-trial rejection probability of a tester.

    ``choices`` enumerates the tester's full (uniform) randomness space and
    ``decide(choice, word)`` returns True to accept.
    """
    choices = list(choices)
    rejected = sum(0 if decide(ch, word) else 1 for ch in choices)
    return Fraction(rejected, len(choices))

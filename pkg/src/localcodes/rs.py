"""Reed-Solomon codes with unique and erasure decoding.

Encoding is polynomial evaluation at a fixed point sequence (the field's
canonical enumeration by default).  Unique decoding is Berlekamp-Welch:
solve for an error locator E and a masked message polynomial N with
N(x_i) = y_i E(x_i), recover the message as N / E, then re-encode and
verify.  The same rational-interpolation engine generalizes to order-s
derivative words, which the multiplicity code reuses for line decoding.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .gf import BinaryField, Poly

ERASED = -1  # marker value inside erasure-decoding inputs


def generalized_berlekamp_welch(
    field: BinaryField,
    xs: Sequence[int],
    received: np.ndarray,
    degree_bound: int,
    e_max: int,
    s: int = 1,
    powers: np.ndarray | None = None,
) -> Poly | None:
    """Unique decoding of an order-s evaluation word by rational interpolation.

    ``received`` has shape (len(xs), s); column j holds the claimed order-j
    Hasse derivative at each point.  Looks for E (degree <= s*e_max) and N
    (degree <= degree_bound + s*e_max) satisfying, for every point x and
    order j < s,

        N^(j)(x) = sum over a+b=j of received[x, a] * E^(b)(x),

    which forces N = f * E for the transmitted f whenever at most e_max
    points disagree with f's order-s evaluation.  Returns f, or None when
    no polynomial of degree <= degree_bound matches all but e_max points.
    """
    xs = list(xs)
    n = len(xs)
    received = np.asarray(received, dtype=np.int64).reshape(n, s)
    e_len = s * e_max + 1
    n_len = degree_bound + s * e_max + 1
    if powers is None or powers.shape[1] < max(n_len, e_len):
        powers = field.power_table(xs, max(n_len, e_len) - 1)

    def deriv_block(width: int, j: int) -> np.ndarray:
        # D[i, c] = C(c, j) x_i^(c-j), binomial mod 2 via Lucas
        block = np.zeros((n, width), dtype=np.int64)
        for c in range(j, width):
            if (c & j) == j:
                block[:, c] = powers[:, c - j]
        return block

    # rows grouped by derivative order j: [N block | E block], E side folds in
    # the received values so the system is homogeneous
    rows = []
    for j in range(s):
        n_block = deriv_block(n_len, j)
        e_block = np.zeros((n, e_len), dtype=np.int64)
        for a in range(j + 1):
            b = j - a
            contrib = deriv_block(e_len, b)
            e_block ^= field.mul_vec(received[:, a : a + 1], contrib)
        rows.append(np.concatenate([n_block, e_block], axis=1))
    system = np.concatenate(rows, axis=0)

    sol = linalg.nullspace_vector(field, system)
    if sol is None:
        return None
    n_poly = Poly(field, sol[:n_len])
    e_poly = Poly(field, sol[n_len:])
    if e_poly.is_zero():
        return None
    f, rem = n_poly.divmod(e_poly)
    if not rem.is_zero() or f.degree > degree_bound:
        return None
    # verify agreement on all but at most e_max points, all s orders at once
    disagree = np.zeros(n, dtype=bool)
    for j in range(s):
        vals = f.hasse_derivative(j).evaluate_many(xs)
        disagree |= vals != received[:, j]
    if int(disagree.sum()) > e_max:
        return None
    return f


class ReedSolomonCode:
    """RS_{k,n} over GF(2^m): evaluations of degree-<k message polynomials."""

    def __init__(
        self,
        field: BinaryField,
        n: int,
        k: int,
        eval_points: Sequence[int] | None = None,
    ):
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        if n > field.order:
            raise ValueError(f"block length {n} exceeds field order {field.order}")
        if eval_points is None:
            eval_points = field.enumeration(n)
        eval_points = [int(x) for x in eval_points]
        if len(eval_points) != n or len(set(eval_points)) != n:
            raise ValueError("evaluation points must be n distinct field elements")
        self.field = field
        self.n = n
        self.k = k
        self.eval_points = tuple(eval_points)
        self._encode_matrix = linalg.vandermonde(field, eval_points, k)
        head = self._encode_matrix[:k]
        head_inv = linalg.invert(field, head)
        assert head_inv is not None  # Vandermonde on distinct points
        self._head_inverse = head_inv
        # word is a codeword iff re-encoding from its first k positions reproduces it
        self._reencode = linalg.matmul(field, self._encode_matrix, head_inv)
        self._bw_powers: np.ndarray | None = None

    # -- basic parameters -------------------------------------------------------

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    @property
    def relative_distance(self) -> Fraction:
        return Fraction(self.n - self.k + 1, self.n)

    @property
    def unique_radius(self) -> int:
        return (self.n - self.k) // 2

    def __repr__(self) -> str:
        return f"ReedSolomonCode(n={self.n}, k={self.k}, field=GF(2^{self.field.k}))"

    # -- operations -------------------------------------------------------------

    def encode(self, message: Sequence[int]) -> np.ndarray:
        message = np.asarray(message, dtype=np.int64)
        if message.shape != (self.k,):
            raise ValueError(f"message length {message.shape} != k={self.k}")
        return linalg.matvec(self.field, self._encode_matrix, message)

    def encode_batch(self, messages: np.ndarray) -> np.ndarray:
        """Encode columns: messages is (k, count) -> (n, count)."""
        return linalg.matmul(self.field, self._encode_matrix, messages)

    def interpolate_message(self, codeword: Sequence[int]) -> np.ndarray:
        """Message of an exact codeword (coefficients from the first k positions)."""
        codeword = np.asarray(codeword, dtype=np.int64)
        return linalg.matvec(self.field, self._head_inverse, codeword[: self.k])

    def is_codeword(self, word: Sequence[int]) -> bool:
        word = np.asarray(word, dtype=np.int64)
        if word.shape != (self.n,):
            raise ValueError(f"word length {word.shape} != n={self.n}")
        return bool(np.array_equal(linalg.matvec(self.field, self._reencode, word[: self.k]), word))

    def decode_unique(self, received: Sequence[int]) -> np.ndarray | None:
        """Message of the unique codeword within floor((n-k)/2), else None."""
        received = np.asarray(received, dtype=np.int64)
        if received.shape != (self.n,):
            raise ValueError(f"received length {received.shape} != n={self.n}")
        if self.is_codeword(received):
            return self.interpolate_message(received)
        if self._bw_powers is None:
            self._bw_powers = self.field.power_table(
                self.eval_points, self.k - 1 + 2 * self.unique_radius
            )
        f = generalized_berlekamp_welch(
            self.field,
            self.eval_points,
            received.reshape(-1, 1),
            degree_bound=self.k - 1,
            e_max=self.unique_radius,
            s=1,
            powers=self._bw_powers,
        )
        if f is None:
            return None
        coeffs = np.zeros(self.k, dtype=np.int64)
        coeffs[: len(f.coeffs)] = f.coeffs
        return coeffs

    def decode_erasures(self, received: Sequence[int]) -> np.ndarray | None:
        """Decode a word whose erased positions carry the ERASED marker.

        Succeeds when at least k positions survive and the surviving values
        are consistent with a single degree-<k polynomial.
        """
        received = np.asarray(received, dtype=np.int64)
        if received.shape != (self.n,):
            raise ValueError(f"received length {received.shape} != n={self.n}")
        known = np.nonzero(received != ERASED)[0]
        if len(known) < self.k:
            return None
        pts = [(self.eval_points[i], int(received[i])) for i in known[: self.k]]
        f = Poly.interpolate(self.field, pts)
        vals = f.evaluate_many([self.eval_points[i] for i in known])
        if not np.array_equal(vals, received[known]):
            return None
        coeffs = np.zeros(self.k, dtype=np.int64)
        coeffs[: len(f.coeffs)] = f.coeffs
        return coeffs

    # -- serialization ------------------------------------------------------------

    def codeword_to_bytes(self, word: Sequence[int]) -> bytes:
        word = np.asarray(word, dtype=np.int64)
        out = bytearray(len(word).to_bytes(4, "little"))
        for v in word:
            out += self.field.element_to_bytes(int(v))
        return bytes(out)

    def codeword_from_bytes(self, raw: bytes) -> np.ndarray:
        count = int.from_bytes(raw[:4], "little")
        size = self.field.element_size_bytes
        vals = [
            self.field.element_from_bytes(raw[4 + i * size : 4 + (i + 1) * size])
            for i in range(count)
        ]
        return np.asarray(vals, dtype=np.int64)

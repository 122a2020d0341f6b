"""Iterated tensor products of a Reed-Solomon base code, with plane testing.

A codeword is an m-dimensional array (side ell, C order with axis 0
outermost) whose every axis-parallel line lies in the base code.  The
single-trial local test reads one random axis-parallel 2-dimensional plane
and checks that all of its rows and columns are base codewords; the
amplified test repeats it ceil(4 * rho_target / rho_base) times.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import ceil, comb

import numpy as np

from . import linalg
from .api import Alphabet, LocalCode, QueryCountingOracle
from .rs import ReedSolomonCode


class TensorCode(LocalCode):
    """m-fold tensor power of a Reed-Solomon base code."""

    def __init__(self, base: ReedSolomonCode, m: int, rho_base: Fraction | None = None):
        if m < 2:
            raise ValueError("tensor power must be at least 2")
        self.base = base
        self.m = m
        self.ell = base.n
        self.field = base.field
        # single-trial soundness constant used to size the amplified test;
        # empirical soundness is what acceptance measures
        self.rho_base = Fraction(1, 4 * m) if rho_base is None else Fraction(rho_base)
        if not 0 < self.rho_base <= 1:
            raise ValueError("rho_base must lie in (0, 1]")

        self.code_id = f"tensor-l{self.ell}-k{base.k}-m{m}-gf{self.field.order}"
        self.block_length = self.ell**m
        self.alphabet = Alphabet(self.field, 1)
        self.rate = Fraction(base.k, base.n) ** m
        self.distance_lower_bound = base.relative_distance**m
        self.queries_per_trial = self.ell**2
        self.query_budget_test = self.test_repetitions(Fraction(1)) * self.queries_per_trial
        # base syndrome map: zero exactly on base codewords
        self._syndrome = _membership_map(base)
        self._plane_cache: dict = {}

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.ell,) * self.m

    def test_repetitions(self, rho_target: Fraction = Fraction(1)) -> int:
        return ceil(4 * Fraction(rho_target) / self.rho_base)

    # -- encoding ----------------------------------------------------------------------

    def encode_array(self, message: np.ndarray) -> np.ndarray:
        """Axis-by-axis base encoding of a side-k message array."""
        message = np.asarray(message, dtype=np.int64)
        if message.shape != (self.base.k,) * self.m:
            raise ValueError(f"message shape {message.shape} != {(self.base.k,) * self.m}")
        out = message
        for axis in range(self.m):
            out = linalg.apply_along_axis(self.field, self.base._encode_matrix, out, axis)
        return out

    def encode(self, message: np.ndarray) -> np.ndarray:
        message = np.asarray(message, dtype=np.int64).reshape((self.base.k,) * self.m)
        return self.encode_array(message).reshape(self.block_length, 1)

    def random_message(self, rng: np.random.Generator) -> np.ndarray:
        return self.field.random_elements(rng, self.base.k**self.m)

    # -- membership ---------------------------------------------------------------------

    def is_codeword_array(self, word: np.ndarray) -> bool:
        """True iff every axis-parallel line is a base codeword."""
        word = np.asarray(word, dtype=np.int64)
        if word.shape != self.shape:
            raise ValueError(f"word shape {word.shape} != {self.shape}")
        for axis in range(self.m):
            if linalg.apply_along_axis(self.field, self._syndrome, word, axis).any():
                return False
        return True

    def is_codeword(self, word: np.ndarray) -> bool:
        return self.is_codeword_array(np.asarray(word, dtype=np.int64).reshape(self.shape))

    # -- plane tester --------------------------------------------------------------------

    def plane_choices(self):
        """The tester's full randomness space: (axis pair, fixed coordinates)."""
        for ax in itertools.combinations(range(self.m), 2):
            rest = [a for a in range(self.m) if a not in ax]
            for coords in itertools.product(range(self.ell), repeat=len(rest)):
                yield ax, tuple(zip(rest, coords))

    def num_plane_choices(self) -> int:
        return comb(self.m, 2) * self.ell ** (self.m - 2)

    def plane_indices(self, axes: tuple[int, int], fixed: tuple[tuple[int, int], ...]) -> np.ndarray:
        """Flat coordinate indices of the chosen plane, as an (ell, ell) array."""
        key = (axes, fixed)
        cached = self._plane_cache.get(key)
        if cached is not None:
            return cached
        coords = np.zeros((self.m, self.ell, self.ell), dtype=np.int64)
        a1, a2 = axes
        coords[a1] = np.arange(self.ell)[:, None]
        coords[a2] = np.arange(self.ell)[None, :]
        for axis, value in fixed:
            coords[axis] = value
        flat = np.zeros((self.ell, self.ell), dtype=np.int64)
        for axis in range(self.m):
            flat = flat * self.ell + coords[axis]
        if len(self._plane_cache) < 4096:
            self._plane_cache[key] = flat
        return flat

    def plane_is_valid(self, plane: np.ndarray) -> bool:
        """Membership of an (ell, ell) plane in base x base: all rows and columns."""
        if linalg.matmul(self.field, self._syndrome, plane).any():
            return False
        return not linalg.matmul(self.field, self._syndrome, plane.T).any()

    def sample_plane(self, rng: np.random.Generator):
        axes_choice = rng.integers(0, comb(self.m, 2))
        pairs = list(itertools.combinations(range(self.m), 2))
        ax = pairs[int(axes_choice)]
        rest = [a for a in range(self.m) if a not in ax]
        coords = tuple((a, int(rng.integers(0, self.ell))) for a in rest)
        return ax, coords

    def plane_test(self, oracle: QueryCountingOracle, rng: np.random.Generator) -> bool:
        """One random plane check: exactly ell^2 queries; True means accept."""
        if self.m < 3:
            raise ValueError("the plane test requires tensor power >= 3")
        ax, fixed = self.sample_plane(rng)
        idx = self.plane_indices(ax, fixed)
        plane = oracle.read_many(idx.ravel())[:, 0].reshape(self.ell, self.ell)
        return self.plane_is_valid(plane)

    def local_test(self, oracle: QueryCountingOracle, rng: np.random.Generator,
                   rho_target: Fraction = Fraction(1)) -> bool:
        """Amplified test: reject as soon as any repetition rejects."""
        for _ in range(self.test_repetitions(rho_target)):
            if not self.plane_test(oracle, rng):
                return False
        return True

    def array_to_bytes(self, word: np.ndarray) -> bytes:
        """JSON shape header plus flat field-element bytes in C order."""
        import json

        word = np.asarray(word, dtype=np.int64).reshape(-1)
        header = json.dumps({"shape": list(self.shape), "field": self.field.to_json()}).encode()
        body = b"".join(self.field.element_to_bytes(int(v)) for v in word)
        return len(header).to_bytes(4, "little") + header + body

    def array_from_bytes(self, raw: bytes) -> np.ndarray:
        import json

        hlen = int.from_bytes(raw[:4], "little")
        header = json.loads(raw[4 : 4 + hlen].decode())
        if tuple(header["shape"]) != self.shape:
            raise ValueError(f"serialized shape {header['shape']} != {self.shape}")
        size = self.field.element_size_bytes
        body = raw[4 + hlen :]
        vals = [self.field.element_from_bytes(body[i * size : (i + 1) * size])
                for i in range(self.block_length)]
        return np.asarray(vals, dtype=np.int64).reshape(self.block_length, 1)

    def exact_single_trial_rejection(self, word: np.ndarray) -> Fraction:
        """Exact rejection probability of one plane trial, by full enumeration."""
        word = np.asarray(word, dtype=np.int64).reshape(self.shape)
        flat = word.reshape(-1)
        rejected = 0
        total = 0
        for ax, fixed in self.plane_choices():
            idx = self.plane_indices(ax, fixed)
            plane = flat[idx.ravel()].reshape(self.ell, self.ell)
            rejected += not self.plane_is_valid(plane)
            total += 1
        return Fraction(rejected, total)


def _membership_map(base: ReedSolomonCode) -> np.ndarray:
    """Matrix S with S w = 0 exactly when w is a base codeword.

    S w = (re-encoding of w from its first k positions) + w, so membership
    coincides with the interpolate-and-verify check of the base code.
    """
    s = np.zeros((base.n, base.n), dtype=np.int64)
    s[:, : base.k] = base._reencode
    s ^= np.eye(base.n, dtype=np.int64)
    return s

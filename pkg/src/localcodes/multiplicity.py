"""Multiplicity codes: order-s Hasse-derivative evaluations of m-variate polynomials.

A codeword coordinate at a point of F^m is the tuple of all Hasse
derivatives of order below s, laid out in graded lexicographic exponent
order.  Local correction restricts the word to random lines through the
target point, decodes each line as a univariate order-s word, and
reconciles the per-line directional derivatives by majority.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from . import linalg
from .api import Alphabet, CorrectFailure, LocalCode, QueryCountingOracle
from .gf import BinaryField, Poly
from .rs import generalized_berlekamp_welch

_DENSE_COEFF_LIMIT = 50_000_000
_LEVEL_SUBSET_CAP = 512
_JOINT_CANDIDATE_CAP = 4096


def graded_exponents(m: int, max_total: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree <= max_total, graded lex order."""
    out = [e for e in itertools.product(range(max_total + 1), repeat=m)
           if sum(e) <= max_total]
    out.sort(key=lambda e: (sum(e), e))
    return out


def _binom_mod2_componentwise(e: Sequence[int], i: Sequence[int]) -> int:
    """Product of C(e_l, i_l) mod 2; odd exactly when i_l is a bit-subset of e_l."""
    return int(all((el & il) == il for el, il in zip(e, i)))


class MultiplicityCode(LocalCode):
    """Order-s evaluations of degree-<=d polynomials in m variables over GF(2^k)."""

    accepts_line_cache = True

    def __init__(self, field: BinaryField, m: int, s: int, d: int):
        if m < 1:
            raise ValueError("number of variables must be at least 1")
        if s < 1:
            raise ValueError("multiplicity order must be at least 1")
        q = field.order
        if not 1 <= d < s * q:
            raise ValueError(f"need 1 <= d < s*q = {s * q} for positive distance")
        if (d + 1) ** m > _DENSE_COEFF_LIMIT:
            raise ValueError("dense coefficient array would be too large")
        self.field = field
        self.m = m
        self.s = s
        self.d = d
        self.q = q

        self.derivs = [e for e in graded_exponents(m, s - 1)]
        self.monomials = graded_exponents(m, d)
        self.num_derivs = len(self.derivs)       # C(m+s-1, m)
        self.dimension = len(self.monomials)     # C(d+m, m)
        assert self.num_derivs == comb(m + s - 1, m)
        assert self.dimension == comb(d + m, m)

        self.enumeration = field.enumeration(q)
        self._eval_matrix = field.power_table(self.enumeration, d)  # (q, d+1)

        self.code_id = f"mult-q{q}-m{m}-s{s}-d{d}"
        self.block_length = q**m
        self.alphabet = Alphabet(field, self.num_derivs)
        self.rate = Fraction(self.dimension, self.num_derivs * q**m)
        self.distance_lower_bound = Fraction(s * q - d, s * q)
        self.correct_radius = self.distance_lower_bound / 10
        self.line_decode_radius = int(q * self.distance_lower_bound / 5)
        # lines sampled by the corrector: the derivative-tuple length plus
        # twice that again as redundancy
        self.num_directions = 3 * self.num_derivs
        self.query_budget_correct = self.num_directions * q

        self._line_powers: np.ndarray | None = None
        self._hermite: np.ndarray | None = None
        self._hermite_head_inv: np.ndarray | None = None
        self._hermite_rows: np.ndarray | None = None
        self._info: tuple[list[tuple[int, int]], np.ndarray] | None = None

    # -- parameter predicates ---------------------------------------------------------

    @property
    def field_condition_ok(self) -> bool:
        """Field-size requirement for the local corrector's contract."""
        q = Fraction(self.q)
        return (q >= 10 * self.m
                and q >= Fraction(self.d + 6 * self.s, self.s)
                and q >= 12 * (self.s + 1))

    @property
    def min_lines_required(self) -> int:
        """Decoded lines needed to pin down the hardest derivative level."""
        return comb(self.s - 1 + self.m - 1, self.m - 1)

    def rate_lower_bound(self) -> Fraction:
        """(1 - m^2/s) * (1 - delta)^m, the closed-form bound the rate must meet."""
        delta = self.distance_lower_bound
        return (1 - Fraction(self.m**2, self.s)) * (1 - delta) ** self.m

    # -- points ------------------------------------------------------------------------

    def point_of_index(self, index: int) -> tuple[int, ...]:
        coords = []
        for _ in range(self.m):
            coords.append(self.enumeration[index % self.q])
            index //= self.q
        return tuple(reversed(coords))

    def index_of_point(self, point: Sequence[int]) -> int:
        idx = 0
        for a in point:
            idx = idx * self.q + self.field.element_index(int(a))
        return idx

    # -- encoding ----------------------------------------------------------------------

    def _dense_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        dense = np.zeros((self.d + 1,) * self.m, dtype=np.int64)
        cols = tuple(np.array([e[l] for e in self.monomials]) for l in range(self.m))
        dense[cols] = coeffs
        return dense

    def _hasse_shift(self, dense: np.ndarray, i: Sequence[int]) -> np.ndarray:
        """Coefficient array of the order-i Hasse derivative."""
        if all(v == 0 for v in i):
            return dense
        out = np.zeros_like(dense)
        src = dense[tuple(slice(v, None) for v in i)]
        out[tuple(slice(0, s) for s in src.shape)] = src
        for axis, v in enumerate(i):
            if v == 0:
                continue
            coords = np.arange(out.shape[axis])
            bad = (coords & v) != 0
            sel = [slice(None)] * self.m
            sel[axis] = bad
            out[tuple(sel)] = 0
        return out

    def encode(self, message: np.ndarray) -> np.ndarray:
        message = np.asarray(message, dtype=np.int64)
        if message.shape != (self.dimension,):
            raise ValueError(f"message length {message.shape} != dimension {self.dimension}")
        dense = self._dense_coeffs(message)
        # all derivative grids evaluated in one stacked contraction per axis
        stacked = np.stack([self._hasse_shift(dense, i) for i in self.derivs], axis=-1)
        vals = stacked
        for axis in range(self.m):
            vals = linalg.apply_along_axis(self.field, self._eval_matrix, vals, axis)
        return vals.reshape(self.block_length, self.num_derivs)

    def encode_poly(self, coeff_map: dict[tuple[int, ...], int]) -> np.ndarray:
        """Encode from a sparse exponent -> coefficient map."""
        vec = np.zeros(self.dimension, dtype=np.int64)
        index = {e: pos for pos, e in enumerate(self.monomials)}
        for e, c in coeff_map.items():
            if sum(e) > self.d:
                raise ValueError(f"monomial {e} exceeds degree bound {self.d}")
            vec[index[tuple(e)]] = c
        return self.encode(vec)

    def random_message(self, rng: np.random.Generator) -> np.ndarray:
        return self.field.random_elements(rng, self.dimension)

    # -- line restriction and decoding ----------------------------------------------------

    def line_indices(self, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
        """Coordinate indices of the points a + t*b, t in canonical order."""
        ts = np.asarray(self.enumeration, dtype=np.int64)
        idx = np.zeros(self.q, dtype=np.int64)
        for l in range(self.m):
            coord = np.int64(a[l]) ^ self.field.mul_vec(ts, np.int64(b[l]))
            idx = idx * self.q + self.field.element_index_vec(coord)
        return idx

    def direction_weights(self, b: Sequence[int]) -> np.ndarray:
        """w[slot] = b^i for each derivative exponent i; converts symbols to
        directional Hasse data via u_j(t) = sum over |i| = j of symbol_i * b^i."""
        out = np.zeros(self.num_derivs, dtype=np.int64)
        for slot, i in enumerate(self.derivs):
            w = 1
            for l in range(self.m):
                if i[l]:
                    w = self.field.mul(w, self._pow(b[l], i[l]))
            out[slot] = w
        return out

    def _pow(self, base: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = self.field.mul(r, base)
        return r

    def restrict_to_line(self, oracle: QueryCountingOracle, a: Sequence[int],
                         b: Sequence[int]) -> np.ndarray:
        """Order-s received word of length q along the line a + t*b (q queries)."""
        if all(v == 0 for v in b):
            raise ValueError("line direction must be nonzero")
        idx = self.line_indices(a, b)
        symbols = oracle.read_many(idx)
        return self._symbols_to_line_word(symbols, b)

    def _symbols_to_line_word(self, symbols: np.ndarray, b: Sequence[int]) -> np.ndarray:
        weights = self.direction_weights(b)
        word = np.zeros((self.q, self.s), dtype=np.int64)
        for slot, i in enumerate(self.derivs):
            j = sum(i)
            if weights[slot] == 0:
                continue
            word[:, j] ^= self.field.mul_vec(symbols[:, slot], np.int64(weights[slot]))
        return word

    def _hermite_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """Full order-s evaluation matrix on the line domain and the inverse of
        its leading (d+1) x (d+1) block, for the zero-error fast path."""
        if self._hermite is None:
            width = self.d + 1
            powers = self._eval_matrix
            blocks = []
            for j in range(self.s):
                block = np.zeros((self.q, width), dtype=np.int64)
                for c in range(j, width):
                    if (c & j) == j:
                        block[:, c] = powers[:, c - j]
                blocks.append(block)
            full = np.concatenate(blocks, axis=0)
            # point-major row order for the leading square block
            point_major = np.concatenate(
                [np.arange(self.s) * self.q + t for t in range(self.q)]
            )
            head = full[point_major[: width]]
            inv = linalg.invert(self.field, head)
            assert inv is not None, "Hermite interpolation block must be invertible"
            self._hermite = full
            self._hermite_head_inv = inv
            self._hermite_rows = point_major[: width]
        return self._hermite, self._hermite_head_inv

    def decode_line(self, word: np.ndarray) -> Poly | None:
        """Unique degree-<=d polynomial agreeing with the order-s word on all
        but line_decode_radius positions; None when no such polynomial exists."""
        word = np.asarray(word, dtype=np.int64).reshape(self.q, self.s)
        full, head_inv = self._hermite_matrices()
        flat = word.T.reshape(-1)  # order-major, matching the stacked blocks
        coeffs = linalg.matvec(self.field, head_inv, flat[self._hermite_rows])
        if np.array_equal(linalg.matvec(self.field, full, coeffs), flat):
            return Poly(self.field, coeffs)
        if self._line_powers is None:
            width = self.d + self.s * self.line_decode_radius + 1
            self._line_powers = self.field.power_table(self.enumeration, width - 1)
        return generalized_berlekamp_welch(
            self.field, self.enumeration, word,
            degree_bound=self.d, e_max=self.line_decode_radius, s=self.s,
            powers=self._line_powers,
        )

    # -- local correction ------------------------------------------------------------------

    def _sample_directions(self, rng: np.random.Generator) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        dirs: list[tuple[int, ...]] = []
        while len(dirs) < self.num_directions:
            block = rng.integers(1, self.q**self.m, size=2 * self.num_directions)
            for raw in block:
                raw = int(raw)
                if raw in seen:
                    continue
                seen.add(raw)
                b = []
                for _ in range(self.m):
                    b.append(self.enumeration[raw % self.q])
                    raw //= self.q
                dirs.append(tuple(b))
                if len(dirs) == self.num_directions:
                    break
        return dirs

    def _canonical_direction(self, b: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
        """Projective representative with leading coordinate 1, and the scalar c
        with b = c * rep."""
        c = next(v for v in b if v != 0)
        inv = self.field.inv(c)
        rep = tuple(self.field.mul(inv, v) for v in b)
        return rep, c

    def local_correct(self, oracle: QueryCountingOracle, index: int,
                      rng: np.random.Generator,
                      line_cache: dict | None = None) -> np.ndarray:
        """Symbol at ``index`` from an oracle within a tenth of the distance.

        Decodes restrictions to num_directions random lines through the
        point, reads off each line's directional derivatives at the point,
        and returns the derivative tuple consistent with the most lines
        (ties broken by canonical tuple order).  ``line_cache`` lets callers
        share decoded lines across repeated invocations; the cached result
        is a pure function of the oracle content.
        """
        if not self.field_condition_ok:
            raise ValueError(
                f"{self.code_id} violates the field-size condition for local correction"
            )
        a = self.point_of_index(index)
        directions = self._sample_directions(rng)
        if self.s == 1:
            return self._correct_order_one(oracle, index, a, directions, line_cache)
        line_data: list[tuple[tuple[int, ...], np.ndarray]] = []
        for b in directions:
            if line_cache is None:
                poly = self.decode_line(self.restrict_to_line(oracle, a, b))
                if poly is None:
                    continue
                gammas = self._poly_head(poly)
            else:
                rep, c = self._canonical_direction(b)
                key = (index, rep)
                if key not in line_cache:
                    poly = self.decode_line(self.restrict_to_line(oracle, a, rep))
                    line_cache[key] = None if poly is None else self._poly_head(poly)
                head = line_cache[key]
                if head is None:
                    continue
                scale = self.field.power_table([c], self.s - 1)[0]
                gammas = self.field.mul_vec(head, scale)
            line_data.append((b, gammas))

        if len(line_data) < self.min_lines_required:
            raise CorrectFailure(
                f"only {len(line_data)} of {self.num_directions} lines decoded"
            )
        return self._resolve_symbol(line_data)

    def _poly_head(self, poly: Poly) -> np.ndarray:
        head = np.zeros(self.s, dtype=np.int64)
        for j in range(min(self.s, len(poly.coeffs))):
            head[j] = poly.coeffs[j]
        return head

    def _correct_order_one(self, oracle, index, a, directions, line_cache) -> np.ndarray:
        """Order-1 specialization: every decoded line votes its value at the
        point directly (the value is invariant under line reparameterization)."""
        votes: dict[int, int] = {}
        decoded = 0
        for b in directions:
            if line_cache is None:
                poly = self.decode_line(self.restrict_to_line(oracle, a, b))
                value = None if poly is None else int(self._poly_head(poly)[0])
            else:
                rep, _ = self._canonical_direction(b)
                key = (index, rep)
                if key not in line_cache:
                    poly = self.decode_line(self.restrict_to_line(oracle, a, rep))
                    line_cache[key] = None if poly is None else int(self._poly_head(poly)[0])
                value = line_cache[key]
            if value is None:
                continue
            decoded += 1
            votes[value] = votes.get(value, 0) + 1
        if decoded < self.min_lines_required:
            raise CorrectFailure(
                f"only {decoded} of {self.num_directions} lines decoded"
            )
        best = min(v for v in votes if votes[v] == max(votes.values()))
        return np.array([best], dtype=np.int64)

    def _resolve_symbol(self, line_data) -> np.ndarray:
        field = self.field
        levels: list[list[int]] = [[] for _ in range(self.s)]
        for slot, i in enumerate(self.derivs):
            levels[sum(i)].append(slot)

        # per-line moment rows, one per level
        rows = []
        for b, gammas in line_data:
            weights = self.direction_weights(b)
            rows.append((weights, gammas))

        level_candidates: list[list[tuple[int, ...]]] = []
        for j in range(self.s):
            slots = levels[j]
            kj = len(slots)
            a_mat = np.array([[w[slot] for slot in slots] for w, _ in rows], dtype=np.int64)
            g_vec = np.array([g[j] for _, g in rows], dtype=np.int64)
            cands: list[tuple[int, ...]] = []
            if kj == 1:
                for l in range(len(rows)):
                    if a_mat[l, 0] != 0:
                        cands.append((field.div(int(g_vec[l]), int(a_mat[l, 0])),))
            else:
                subsets = list(itertools.combinations(range(len(rows)), kj))
                if len(subsets) > _LEVEL_SUBSET_CAP:
                    subsets = [tuple(range(r, r + kj)) for r in range(len(rows) - kj + 1)]
                for idx in subsets:
                    sol = linalg.solve(field, a_mat[list(idx)], g_vec[list(idx)])
                    if sol is not None:
                        cands.append(tuple(int(v) for v in sol))
            cands = sorted(set(cands))
            if not cands:
                raise CorrectFailure(f"no candidate solution at derivative level {j}")
            level_candidates.append(cands)

        total = 1
        for c in level_candidates:
            total *= len(c)
        if total > _JOINT_CANDIDATE_CAP:
            level_candidates = [self._best_per_level(j, cands, levels, rows)
                                for j, cands in enumerate(level_candidates)]

        best = None
        best_score = -1
        for combo in itertools.product(*level_candidates):
            symbol = np.zeros(self.num_derivs, dtype=np.int64)
            for j, theta in enumerate(combo):
                for slot, val in zip(levels[j], theta):
                    symbol[slot] = val
            score = self._consistency(symbol, rows)
            key = tuple(int(v) for v in symbol)
            if score > best_score or (score == best_score and key < best):
                best_score = score
                best = key
        return np.array(best, dtype=np.int64)

    def _best_per_level(self, j, cands, levels, rows) -> list[tuple[int, ...]]:
        slots = levels[j]
        scored = []
        for cand in cands:
            hits = 0
            for w, g in rows:
                lhs = 0
                for slot, val in zip(slots, cand):
                    lhs ^= self.field.mul(int(w[slot]), val)
                hits += lhs == int(g[j])
            scored.append((-hits, cand))
        scored.sort()
        return [scored[0][1]]

    def _consistency(self, symbol: np.ndarray, rows) -> int:
        hits = 0
        for w, g in rows:
            ok = True
            for j in range(self.s):
                lhs = 0
                for slot, i in enumerate(self.derivs):
                    if sum(i) == j and w[slot]:
                        lhs ^= self.field.mul(int(w[slot]), int(symbol[slot]))
                if lhs != int(g[j]):
                    ok = False
                    break
            hits += ok
        return hits

    # -- systematic encoding ------------------------------------------------------------------

    def _point_rows(self, point_index: int) -> np.ndarray:
        """All num_derivs evaluation rows of one point over the monomial basis."""
        a = self.point_of_index(point_index)
        powers = [self.field.power_table([coord], self.d)[0] for coord in a]
        exps = [np.array([e[l] for e in self.monomials]) for l in range(self.m)]
        rows = np.zeros((self.num_derivs, self.dimension), dtype=np.int64)
        for slot, i in enumerate(self.derivs):
            mask = np.ones(self.dimension, dtype=bool)
            val = np.ones(self.dimension, dtype=np.int64)
            for l in range(self.m):
                il = i[l]
                el = exps[l]
                mask &= (el & il) == il
                shifted = np.where(el >= il, el - il, 0)
                val = self.field.mul_vec(val, powers[l][shifted])
            rows[slot] = np.where(mask, val, 0)
        return rows

    def _build_information_set(self) -> tuple[list[tuple[int, int]], np.ndarray]:
        """Information set in slot order plus the basis-change matrix.

        Slots run point-major, derivative-minor.  The leading ``dimension``
        slots are tried first; if their evaluation block is singular the set
        is extended greedily, keeping each subsequent slot whose row is
        independent of those already kept.
        """
        dim = self.dimension
        head_points = -(-dim // self.num_derivs)
        head = np.concatenate([self._point_rows(p) for p in range(head_points)])[:dim]
        inv = linalg.invert(self.field, head)
        if inv is not None:
            kept = [(p, s) for p in range(head_points) for s in range(self.num_derivs)][:dim]
            return kept, inv

        # Greedy extension: eliminating the transposed evaluation block picks,
        # as pivot columns, exactly the first independent slots in scan order.
        rows: list[np.ndarray] = []
        next_point = 0
        target_slots = min(self.block_length * self.num_derivs,
                           dim + 16 * self.num_derivs)
        while True:
            while len(rows) * self.num_derivs < target_slots and next_point < self.block_length:
                rows.append(self._point_rows(next_point))
                next_point += 1
            stacked = np.concatenate(rows)
            work = np.ascontiguousarray(stacked.T)
            _, pivots = linalg._eliminate(self.field, work, forward_only=True)
            if len(pivots) >= dim:
                chosen = pivots[:dim]
                kept = [(c // self.num_derivs, c % self.num_derivs) for c in chosen]
                a_mat = stacked[chosen]
                inv = linalg.invert(self.field, a_mat)
                assert inv is not None
                return kept, inv
            if next_point >= self.block_length:
                raise ValueError(
                    "evaluation map is rank deficient; cannot build information set"
                )
            target_slots = min(self.block_length * self.num_derivs, target_slots * 2)

    def information_slots(self) -> list[tuple[int, int]]:
        if self._info is None:
            self._info = self._build_information_set()
        return self._info[0]

    # -- serialization -----------------------------------------------------------------------

    def symbol_to_bytes(self, symbol: np.ndarray) -> bytes:
        """Concatenated field-element bytes in derivative-slot order."""
        out = bytearray()
        for v in symbol:
            out += self.field.element_to_bytes(int(v))
        return bytes(out)

    def codeword_to_bytes(self, word: np.ndarray) -> bytes:
        """Point-major symbol concatenation."""
        word = np.asarray(word, dtype=np.int64)
        return b"".join(self.symbol_to_bytes(sym) for sym in word)

    def codeword_from_bytes(self, raw: bytes) -> np.ndarray:
        size = self.field.element_size_bytes
        per_symbol = size * self.num_derivs
        if len(raw) != per_symbol * self.block_length:
            raise ValueError("serialized codeword has the wrong length")
        out = np.zeros((self.block_length, self.num_derivs), dtype=np.int64)
        for p in range(self.block_length):
            base = p * per_symbol
            for slot in range(self.num_derivs):
                chunk = raw[base + slot * size : base + (slot + 1) * size]
                out[p, slot] = self.field.element_from_bytes(chunk)
        return out

    def systematic_encode(self, message: np.ndarray) -> np.ndarray:
        """Codeword whose information slots carry ``message`` verbatim."""
        message = np.asarray(message, dtype=np.int64)
        if message.shape != (self.dimension,):
            raise ValueError(f"message length {message.shape} != dimension {self.dimension}")
        if self._info is None:
            self._info = self._build_information_set()
        coeffs = linalg.matvec(self.field, self._info[1], message)
        return self.encode(coeffs)

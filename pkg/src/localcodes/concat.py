"""Concatenation with a short binary inner code.

Each big-alphabet symbol of the outer code is split into k_in-bit chunks,
every chunk encoded by a small binary block code found by greedy search.
The binary local corrector and tester emulate their outer counterparts,
answering each outer query by reading and decoding (corrector) or
membership-checking (tester) the inner blocks of that symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .api import Alphabet, ConstructionFailure, LocalCode, QueryCountingOracle
from .gf import BinaryField


def _popcount(values: np.ndarray) -> np.ndarray:
    out = np.zeros(values.shape, dtype=np.int64)
    v = values.copy()
    while v.any():
        out += v & 1
        v >>= 1
    return out


class BinaryBlockCode:
    """Small [n, k] binary linear code with an exact minimum distance.

    Codewords are n-bit ints (bit i of the int is position i); decoding is
    exhaustive nearest-codeword over all 2^k codewords, exact by
    construction.
    """

    def __init__(self, n: int, k: int, generator_rows: list[int]):
        if k > 20:
            raise ValueError("inner dimension capped at 20 (exhaustive scans)")
        if len(generator_rows) != k:
            raise ValueError("need exactly k generator rows")
        self.n = n
        self.k = k
        self.generator = list(int(g) for g in generator_rows)
        table = np.zeros(1 << k, dtype=np.int64)
        for msg in range(1 << k):
            word = 0
            for bit in range(k):
                if (msg >> bit) & 1:
                    word ^= self.generator[bit]
            table[msg] = word
        self.codewords = table
        if len(set(table.tolist())) != 1 << k:
            raise ValueError("generator rows are not linearly independent")
        weights = _popcount(table[1:])
        self.min_dist = int(weights.min()) if k > 0 else n
        self._member = {int(w) for w in table.tolist()}
        # nearest-codeword lookup for every received word when affordable
        self._decode_table: np.ndarray | None = None
        if n <= 16:
            received = np.arange(1 << n, dtype=np.int64)
            best = np.full(1 << n, -1, dtype=np.int64)
            best_d = np.full(1 << n, n + 1, dtype=np.int64)
            for msg in range(1 << k):
                d = _popcount(received ^ int(table[msg]))
                better = d < best_d
                best[better] = msg
                best_d[better] = d[better]
            self._decode_table = best

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    @property
    def relative_distance(self) -> Fraction:
        return Fraction(self.min_dist, self.n)

    def encode_bits(self, msg: int) -> int:
        return int(self.codewords[msg])

    def is_codeword(self, word: int) -> bool:
        return word in self._member

    def decode_bits(self, word: int) -> int:
        """Nearest-codeword message (deterministic tie-break by message index)."""
        if self._decode_table is not None:
            return int(self._decode_table[word])
        d = _popcount(self.codewords ^ word)
        return int(d.argmin())


def build_inner_greedy(n: int, k: int, target_dist: int) -> BinaryBlockCode:
    """Greedy lexicographic linear code of the requested distance.

    Scans candidate rows in increasing numeric order, keeping one whenever
    the span it generates stays at minimum weight >= target_dist; fails
    when the scan is exhausted before reaching dimension k.
    """
    if k > 20:
        raise ConstructionFailure("inner dimension capped at 20")
    span = np.zeros(1, dtype=np.int64)  # current code, starts as {0}
    rows: list[int] = []
    for candidate in range(1, 1 << n):
        new_words = span ^ candidate
        if int(_popcount(new_words).min()) >= target_dist:
            rows.append(candidate)
            span = np.concatenate([span, new_words])
            if len(rows) == k:
                code = BinaryBlockCode(n, k, rows)
                assert code.min_dist >= target_dist
                return code
    raise ConstructionFailure(
        f"greedy search found only dimension {len(rows)} at distance {target_dist}"
    )


@dataclass(frozen=True)
class SymbolLayout:
    """How one outer symbol's bits map into inner-code blocks."""

    bits_per_symbol: int
    chunk_bits: int
    chunks: int
    block_bits: int

    @property
    def bits_per_encoded_symbol(self) -> int:
        return self.chunks * self.block_bits


class ConcatenatedCode(LocalCode):
    """Binary code: outer code over GF(2)-vector symbols, inner binary blocks.

    Symbol bits are packed big-endian into ceil(bits/k_in) chunks, the last
    chunk zero-padded.  The binary word is the concatenation of the inner
    encodings of all chunks of all outer symbols.
    """

    def __init__(self, outer: LocalCode, inner: BinaryBlockCode):
        self.outer = outer
        self.inner = inner
        bits = outer.alphabet.bits
        chunks = -(-bits // inner.k)
        self.layout = SymbolLayout(bits, inner.k, chunks, inner.n)
        self.code_id = f"concat-{outer.code_id}-in{inner.n}.{inner.k}.{inner.min_dist}"
        self.block_length = outer.block_length * chunks * inner.n
        self.alphabet = Alphabet(BinaryField(1), 1)
        fill = Fraction(bits, chunks * inner.k)
        self.rate = Fraction(outer.rate) * inner.rate * fill
        self.distance_lower_bound = Fraction(outer.distance_lower_bound) * inner.relative_distance
        if outer.supports_correction and outer.correct_radius is not None:
            # inner blocks mis-decode only above half their distance; a quarter
            # of the outer radius is the derated binary budget
            self.correct_radius = Fraction(outer.correct_radius) / 4
            if outer.query_budget_correct is not None:
                self.query_budget_correct = (
                    outer.query_budget_correct * chunks * inner.n
                )
        if outer.supports_testing and outer.query_budget_test is not None:
            self.query_budget_test = outer.query_budget_test * chunks * inner.n

    # -- bit packing -----------------------------------------------------------------

    def _symbol_to_chunks(self, symbol: np.ndarray) -> list[int]:
        """Big-endian bit packing of one outer symbol into chunk messages."""
        field_bits = self.outer.alphabet.field.k
        bits: list[int] = []
        for component in symbol:
            for pos in range(field_bits - 1, -1, -1):
                bits.append((int(component) >> pos) & 1)
        bits.extend([0] * (self.layout.chunks * self.layout.chunk_bits - len(bits)))
        out = []
        for c in range(self.layout.chunks):
            chunk = 0
            for pos in range(self.layout.chunk_bits):
                chunk = (chunk << 1) | bits[c * self.layout.chunk_bits + pos]
            out.append(chunk)
        return out

    def _chunks_to_symbol(self, chunks: list[int]) -> np.ndarray:
        bits: list[int] = []
        for chunk in chunks:
            for pos in range(self.layout.chunk_bits - 1, -1, -1):
                bits.append((chunk >> pos) & 1)
        field_bits = self.outer.alphabet.field.k
        symbol = np.zeros(self.outer.alphabet.length, dtype=np.int64)
        for comp in range(self.outer.alphabet.length):
            val = 0
            for pos in range(field_bits):
                val = (val << 1) | bits[comp * field_bits + pos]
            symbol[comp] = val
        return symbol

    def _block_to_bits(self, word_bits: int) -> np.ndarray:
        return np.array([(word_bits >> i) & 1 for i in range(self.inner.n)], dtype=np.int64)

    def _bits_to_block(self, bits: np.ndarray) -> int:
        word = 0
        for i, b in enumerate(bits):
            word |= int(b) << i
        return word

    # -- encoding --------------------------------------------------------------------

    def encode_outer_word(self, outer_word: np.ndarray) -> np.ndarray:
        n_blocks = self.outer.block_length * self.layout.chunks
        out = np.zeros((n_blocks * self.inner.n, 1), dtype=np.int64)
        pos = 0
        for symbol in outer_word:
            for chunk in self._symbol_to_chunks(symbol):
                encoded = self.inner.encode_bits(chunk)
                out[pos : pos + self.inner.n, 0] = self._block_to_bits(encoded)
                pos += self.inner.n
        return out

    def encode(self, message: np.ndarray) -> np.ndarray:
        return self.encode_outer_word(self.outer.encode(message))

    def random_message(self, rng: np.random.Generator) -> np.ndarray:
        return self.outer.random_message(rng)

    # -- emulation oracle ---------------------------------------------------------------

    class _OuterView:
        """Outer-word oracle backed by inner decoding of the binary oracle."""

        def __init__(self, code: "ConcatenatedCode", oracle: QueryCountingOracle,
                     reject_invalid: bool):
            self.code = code
            self.oracle = oracle
            self.reject_invalid = reject_invalid
            self.count = 0
            self.log = None

        def read(self, i: int) -> np.ndarray:
            # every emulated query re-reads its blocks, keeping the binary
            # query count exactly (outer queries) * chunks * n_in
            self.count += 1
            i = int(i)
            code = self.code
            chunks = []
            per_sym = code.layout.chunks * code.inner.n
            base = i * per_sym
            bits = self.oracle.read_many(np.arange(base, base + per_sym))[:, 0]
            for c in range(code.layout.chunks):
                block = code._bits_to_block(bits[c * code.inner.n : (c + 1) * code.inner.n])
                if self.reject_invalid and not code.inner.is_codeword(block):
                    raise ConcatenatedCode._InvalidBlock(i)
                chunks.append(code.inner.decode_bits(block))
            return code._chunks_to_symbol(chunks)

        def read_many(self, indices) -> np.ndarray:
            return np.stack([self.read(i) for i in np.asarray(indices, dtype=np.int64)])

        def is_erased(self, i) -> bool:
            return False

        def any_erased(self, indices) -> bool:
            return False

    class _InvalidBlock(Exception):
        pass

    # -- locality ------------------------------------------------------------------------

    @property
    def supports_correction(self) -> bool:
        return self.outer.supports_correction

    @property
    def supports_testing(self) -> bool:
        return self.outer.supports_testing

    def local_correct(self, oracle: QueryCountingOracle, index: int,
                      rng: np.random.Generator) -> np.ndarray:
        """Correct one bit: run the outer corrector on the symbol that owns it,
        re-encode the symbol's bits, and read off the requested position."""
        per_sym = self.layout.chunks * self.inner.n
        symbol_index = index // per_sym
        within = index % per_sym
        chunk_index = within // self.inner.n
        bit_index = within % self.inner.n
        view = self._OuterView(self, oracle, reject_invalid=False)
        symbol = self.outer.local_correct(view, symbol_index, rng)
        chunk = self._symbol_to_chunks(symbol)[chunk_index]
        encoded = self.inner.encode_bits(chunk)
        return np.array([(encoded >> bit_index) & 1], dtype=np.int64)

    def local_test(self, oracle: QueryCountingOracle, rng: np.random.Generator) -> bool:
        """Emulated outer test; any queried non-codeword inner block rejects."""
        view = self._OuterView(self, oracle, reject_invalid=True)
        try:
            return bool(self.outer.local_test(view, rng))
        except ConcatenatedCode._InvalidBlock:
            return False

    # -- serialization ----------------------------------------------------------------------

    @staticmethod
    def pack_bits(word: np.ndarray) -> bytes:
        """Bits to bytes, little-endian within each byte."""
        bits = np.asarray(word, dtype=np.int64).reshape(-1)
        out = bytearray((len(bits) + 7) // 8)
        for i, b in enumerate(bits):
            if b:
                out[i // 8] |= 1 << (i % 8)
        return bytes(out)

    @staticmethod
    def unpack_bits(raw: bytes, count: int) -> np.ndarray:
        return np.array([(raw[i // 8] >> (i % 8)) & 1 for i in range(count)],
                        dtype=np.int64).reshape(-1, 1)

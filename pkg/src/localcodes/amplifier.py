"""Distance amplification of a locally correctable or testable code.

The transform partitions an inner codeword into blocks, encodes each block
with a short Reed-Solomon code, scatters the block symbols along the edges
of a bipartite sampler graph, and bundles each right vertex's edge symbols
into one big alphabet symbol.  Corruption of any tau fraction of the big
symbols then leaves all but a small fraction of blocks decodable, which is
exactly the error pattern the inner code's local algorithms tolerate.

The corrector emulates the inner corrector, answering each of its queries
by decoding the block that covers the queried coordinate (majority-
amplified so a union bound over one block's worth of queries survives).
The tester emulates the inner tester, rejecting outright whenever a
queried coordinate's block fails exact Reed-Solomon membership or touches
an erasure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from . import linalg
from .api import Alphabet, CorrectFailure, LocalCode, QueryCountingOracle
from .gf import BinaryField
from .rs import ReedSolomonCode
from .sampler import CertReport, SamplerGraph, SamplerParams, build_seeded_random


class ParameterError(ValueError):
    """Infeasible amplifier parameters; the message names the constraint."""

    def __init__(self, constraint: str, message: str):
        self.constraint = constraint
        super().__init__(f"{constraint}: {message}")


AMPLIFIED = "amplified"
PADDED = "padded"
RS_FALLBACK = "rs-fallback"


@dataclass(frozen=True)
class AmplifierParams:
    """Derived parameters of one transform instance.

    ``tau`` is the working error parameter (half the target distance in
    tester mode), ``inner_radius`` the inner contract the sampler must
    match (the alpha of the sampler), ``eps`` the rate slack (gamma is
    eps/2).  The Reed-Solomon layer has dimension b and block length d
    over a field of t alphabet-symbols worth of bits.
    """

    kind: Literal["lcc", "ltc"]
    target: Fraction
    tau: Fraction
    eps: Fraction
    inner_radius: Fraction
    b: int
    t: int
    d: int
    mode: str
    n_w: int
    n_w_padded: int
    n_blocks: int
    lambda_bits: int

    @property
    def field_bits(self) -> int:
        return self.t * self.lambda_bits

    @property
    def block_symbols(self) -> int:
        """Inner symbols per block: b * t."""
        return self.b * self.t

    @property
    def rs_relative_distance(self) -> Fraction:
        return Fraction(self.d - self.b + 1, self.d)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "target": str(self.target),
            "tau": str(self.tau),
            "eps": str(self.eps),
            "inner_radius": str(self.inner_radius),
            "b": self.b,
            "t": self.t,
            "d": self.d,
            "mode": self.mode,
            "n_w": self.n_w,
            "n_w_padded": self.n_w_padded,
            "n_blocks": self.n_blocks,
            "lambda_bits": self.lambda_bits,
        }


def derive_parameters(inner: LocalCode, kind: str, target, eps, d: int) -> AmplifierParams:
    """Parameter derivation for a degree-d sampler and the given inner code.

    Corrector mode takes the target error fraction tau in (0, 1/2); tester
    mode takes the target relative distance delta in (0, 1) and runs the
    same arithmetic with tau = delta/2 and the inner distance halved.
    Chooses the Reed-Solomon dimension b = floor(d(1 - 2 tau - eps)) + 1,
    the field as the minimal power of the inner alphabet reaching d, and
    the layout mode by divisibility of the inner block length.
    """
    target = Fraction(target)
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ParameterError("eps-range", f"eps = {eps} outside (0, 1)")
    if kind == "lcc":
        if not 0 < target < Fraction(1, 2):
            raise ParameterError("tau-range", f"tau = {target} outside (0, 1/2)")
        tau = target
        if not inner.supports_correction or inner.correct_radius is None:
            raise ParameterError("inner-corrector", f"{inner.code_id} has no local corrector")
        inner_radius = Fraction(inner.correct_radius)
    elif kind == "ltc":
        if not 0 < target < 1:
            raise ParameterError("delta-range", f"delta = {target} outside (0, 1)")
        tau = target / 2
        if not inner.supports_testing:
            raise ParameterError("inner-tester", f"{inner.code_id} has no local tester")
        inner_radius = Fraction(inner.distance_lower_bound) / 2
    else:
        raise ParameterError("kind", f"unknown kind {kind!r}")

    if 2 * tau + eps >= 1:
        raise ParameterError(
            "rs-distance", f"2*tau + eps = {2 * tau + eps} >= 1 leaves no Reed-Solomon rate"
        )

    lambda_bits = inner.alphabet.bits
    t = 1
    while (1 << (lambda_bits * t)) < d:
        t += 1
    if lambda_bits * t > 32:
        raise ParameterError(
            "field-size", f"needs GF(2^{lambda_bits * t}); fields beyond 2^32 are unsupported"
        )
    b = int(d * (1 - 2 * tau - eps)) + 1
    n_w = inner.block_length
    bt = b * t
    if n_w % bt == 0:
        mode = AMPLIFIED
        n_pad = n_w
    elif n_w > Fraction(bt) / eps:
        mode = PADDED
        n_pad = ((n_w + bt - 1) // bt) * bt
    else:
        mode = RS_FALLBACK
        n_pad = n_w
    n_blocks = n_pad // bt
    if mode != RS_FALLBACK and d > n_blocks:
        raise ParameterError(
            "sampler-degree",
            f"degree d = {d} exceeds the {n_blocks} blocks available as sampler vertices",
        )
    return AmplifierParams(
        kind=kind, target=target, tau=tau, eps=eps, inner_radius=inner_radius,
        b=b, t=t, d=d, mode=mode, n_w=n_w, n_w_padded=n_pad,
        n_blocks=n_blocks, lambda_bits=lambda_bits,
    )


class _BlockReject(Exception):
    """Raised inside tester emulation when a queried block is invalid."""


class _InnerWordView:
    """Oracle over the emulated inner word, backed by block decoding.

    Reads of inner coordinate i resolve to the block i // (b t); blocks are
    reconstructed by reading the d big symbols adjacent to the block's left
    vertex and reversing the edge permutation, then either unique-decoded
    (corrector flavor) or membership-checked (tester flavor).  Block
    results are cached per top-level invocation; they are deterministic in
    the oracle content, so sharing them across repetitions only removes
    duplicate work.
    """

    def __init__(self, code: "AmplifiedCode", oracle: QueryCountingOracle, flavor: str):
        self.code = code
        self.oracle = oracle
        self.flavor = flavor
        self.block_cache: dict[int, np.ndarray | None] = {}
        bt = code.params.block_symbols
        self._materialized = np.zeros(
            (code.params.n_blocks * bt, code.inner.alphabet.length), dtype=np.int64
        )
        self._have = np.zeros(code.params.n_blocks, dtype=bool)
        self._bad = np.zeros(code.params.n_blocks, dtype=bool)
        self.count = 0
        self.log = None

    def _reconstruct_block(self, u: int) -> tuple[np.ndarray, bool]:
        ports = self.code.graph.neighbors_left(u)
        erased = self.oracle.any_erased(ports[:, 0])
        symbols = self.oracle.read_many(ports[:, 0])
        block = symbols[np.arange(self.code.params.d), ports[:, 1]]
        return block, erased

    def _block_symbols(self, u: int) -> np.ndarray | None:
        if self._have[u]:
            return self.block_cache[u]
        code = self.code
        block, erased = self._reconstruct_block(u)
        result: np.ndarray | None
        if self.flavor == "test":
            if erased or not code.rs.is_codeword(block):
                result = None
            else:
                message = code.rs.interpolate_message(block)
                lam = code._unpack_block(message)
                if code.params.mode == PADDED and not code._padding_clean(u, lam):
                    result = None
                else:
                    result = lam
        else:
            decoded = None if erased else code.rs.decode_unique(block)
            if decoded is None:
                result = None
            else:
                reencoded = code.rs.encode(decoded)
                mismatch = int((reencoded != block).sum())
                if Fraction(mismatch, code.params.d) > code.block_decode_radius:
                    result = None
                else:
                    result = code._unpack_block(decoded)
        self.block_cache[u] = result
        self._have[u] = True
        bt = code.params.block_symbols
        if result is None:
            self._bad[u] = True
        else:
            self._materialized[u * bt : (u + 1) * bt] = result
        return result

    def _value(self, i: int) -> np.ndarray:
        code = self.code
        bt = code.params.block_symbols
        lam = self._block_symbols(i // bt)
        if lam is None:
            if self.flavor == "test":
                raise _BlockReject(i // bt)
            # corrector emulation answers failed blocks with the zero symbol
            return np.zeros(code.inner.alphabet.length, dtype=np.int64)
        return lam[i % bt]

    def read(self, i: int) -> np.ndarray:
        self.count += 1
        return self._value(int(i))

    def read_many(self, indices) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        self.count += len(idx)
        bt = self.code.params.block_symbols
        blocks = idx // bt
        missing = ~self._have[blocks]
        if missing.any():
            for u in np.unique(blocks[missing]):
                self._block_symbols(int(u))
        if self.flavor == "test":
            bad = self._bad[blocks]
            if bad.any():
                raise _BlockReject(int(blocks[bad][0]))
        return self._materialized[idx].copy()

    def is_erased(self, i: int) -> bool:
        return False

    def any_erased(self, indices) -> bool:
        return False


class AmplifiedCode(LocalCode):
    """The transform output: block RS + sampler permutation + bundling."""

    def __init__(self, inner: LocalCode, params: AmplifierParams, graph: SamplerGraph,
                 cert_report: CertReport | None = None):
        if params.mode == RS_FALLBACK:
            raise ValueError("fallback parameters; build RsFallbackCode instead")
        if graph.n != params.n_blocks:
            raise ValueError(f"graph has {graph.n} vertices, need {params.n_blocks}")
        if graph.d != params.d:
            raise ValueError(f"graph degree {graph.d} != d = {params.d}")
        self.inner = inner
        self.params = params
        self.graph = graph
        self.cert_report = cert_report
        self.field = BinaryField(params.field_bits)
        self.rs = ReedSolomonCode(self.field, params.d, params.b)

        self.code_id = f"amplified-{params.kind}-{inner.code_id}-d{params.d}"
        self.block_length = params.n_blocks
        self.alphabet = Alphabet(self.field, params.d)
        self.rate = Fraction(inner.rate) * params.n_w / (params.n_blocks * params.d * params.t)
        if params.kind == "lcc":
            self.distance_lower_bound = 2 * params.target
            self.correct_radius = params.target
        else:
            self.distance_lower_bound = params.target
            self.correct_radius = None

        # corrector-side block decoding radius: tau + eps/2 (never beyond the
        # Berlekamp-Welch unique radius, which the decoder enforces itself)
        self.block_decode_radius = params.tau + params.eps / 2
        btd = params.b * params.t * params.d
        self.inner_repetitions = math.ceil(18 * math.log(3 * btd))
        if params.kind == "lcc" and inner.query_budget_correct is not None:
            self.query_budget_correct = (
                btd * self.inner_repetitions * inner.query_budget_correct * params.d
            )
        self.test_rho = min(Fraction(1, 2 * btd), Fraction(inner.distance_lower_bound) / 2)
        self.test_repetitions = math.ceil(4 / self.test_rho)
        if params.kind == "ltc" and inner.query_budget_test is not None:
            self.query_budget_test = (
                self.test_repetitions * inner.query_budget_test * params.d
            )

    # -- packing between the inner alphabet and the RS field ---------------------------

    def _pack_lambda(self, w: np.ndarray) -> np.ndarray:
        """(n_w_padded, K) inner symbols -> flat field elements, low symbol first."""
        k_in = self.inner.alphabet.field.k
        packed = np.zeros(self.params.n_w_padded, dtype=np.int64)
        for slot in range(self.inner.alphabet.length):
            packed |= w[:, slot] << (slot * k_in)
        grouped = packed.reshape(-1, self.params.t)
        out = np.zeros(grouped.shape[0], dtype=np.int64)
        for u in range(self.params.t):
            out |= grouped[:, u] << (u * self.params.lambda_bits)
        return out

    def _unpack_lambda(self, f_vals: np.ndarray) -> np.ndarray:
        lam_mask = (1 << self.params.lambda_bits) - 1
        grouped = np.zeros((len(f_vals), self.params.t), dtype=np.int64)
        for u in range(self.params.t):
            grouped[:, u] = (f_vals >> (u * self.params.lambda_bits)) & lam_mask
        packed = grouped.reshape(-1)
        k_in = self.inner.alphabet.field.k
        k_mask = (1 << k_in) - 1
        out = np.zeros((len(packed), self.inner.alphabet.length), dtype=np.int64)
        for slot in range(self.inner.alphabet.length):
            out[:, slot] = (packed >> (slot * k_in)) & k_mask
        return out

    def _unpack_block(self, message: np.ndarray) -> np.ndarray:
        """RS message (b field elements) -> the block's b*t inner symbols."""
        return self._unpack_lambda(np.asarray(message, dtype=np.int64))

    def _padding_clean(self, u: int, lam: np.ndarray) -> bool:
        """Padded coordinates of block u must decode to zero symbols."""
        bt = self.params.block_symbols
        start = u * bt
        overhang = start + bt - self.params.n_w
        if overhang <= 0:
            return True
        return not lam[bt - overhang :].any()

    # -- bijection ----------------------------------------------------------------------

    def amplify_encode(self, w: np.ndarray) -> np.ndarray:
        """Inner codeword -> amplified codeword (blocks, RS, edge scatter)."""
        w = np.asarray(w, dtype=np.int64)
        expected = (self.params.n_w, self.inner.alphabet.length)
        if w.shape != expected:
            raise ValueError(f"inner codeword shape {w.shape} != {expected}")
        padded = np.zeros((self.params.n_w_padded, self.inner.alphabet.length), dtype=np.int64)
        padded[: self.params.n_w] = w
        f_string = self._pack_lambda(padded)
        blocks = f_string.reshape(self.params.n_blocks, self.params.b)
        encoded = self.rs.encode_batch(blocks.T).T  # (n_blocks, d)
        table = self.graph._left
        out = np.zeros_like(encoded)
        out[table[:, :, 0], table[:, :, 1]] = encoded
        return out

    def amplify_decode(self, c: np.ndarray) -> np.ndarray:
        """Exact inverse of amplify_encode on codewords."""
        c = np.asarray(c, dtype=np.int64)
        table = self.graph._left
        blocks = c[table[:, :, 0], table[:, :, 1]]  # (n_blocks, d)
        messages = linalg.matmul(self.field, self.rs._head_inverse,
                                 blocks[:, : self.params.b].T).T
        lam = self._unpack_lambda(messages.reshape(-1))
        return lam[: self.params.n_w]

    def encode(self, message: np.ndarray) -> np.ndarray:
        return self.amplify_encode(self.inner.encode(message))

    def random_message(self, rng: np.random.Generator) -> np.ndarray:
        return self.inner.random_message(rng)

    # -- local correction -----------------------------------------------------------------

    @property
    def supports_correction(self) -> bool:
        return self.params.kind == "lcc"

    @property
    def supports_testing(self) -> bool:
        return self.params.kind == "ltc"

    def _majority_correct(self, view: _InnerWordView, i_w: int,
                          rng: np.random.Generator, line_cache: dict) -> np.ndarray:
        votes: dict[tuple, int] = {}
        accepts_cache = getattr(self.inner, "accepts_line_cache", False)
        for _ in range(self.inner_repetitions):
            try:
                if accepts_cache:
                    sym = self.inner.local_correct(view, i_w, rng, line_cache=line_cache)
                else:
                    sym = self.inner.local_correct(view, i_w, rng)
            except CorrectFailure:
                continue
            votes[tuple(int(v) for v in sym)] = votes.get(tuple(int(v) for v in sym), 0) + 1
        if not votes:
            raise CorrectFailure(f"inner corrector failed on all repetitions at {i_w}")
        best = max(sorted(votes), key=lambda k: votes[k])
        return np.array(best, dtype=np.int64)

    def a0_correct(self, oracle: QueryCountingOracle, i_w: int,
                   rng: np.random.Generator) -> np.ndarray:
        """Majority-amplified inner coordinate correction from the C-side oracle."""
        if not self.supports_correction:
            raise ValueError("corrector available only in lcc mode")
        view = _InnerWordView(self, oracle, "correct")
        return self._majority_correct(view, i_w, rng, {})

    def local_correct(self, oracle: QueryCountingOracle, index: int,
                      rng: np.random.Generator) -> np.ndarray:
        """Recover big symbol ``index``: correct every inner symbol feeding the
        blocks adjacent to the right vertex, re-encode them, and reassemble."""
        if not self.supports_correction:
            raise ValueError("corrector available only in lcc mode")
        p = self.params
        bt = p.block_symbols
        view = _InnerWordView(self, oracle, "correct")
        ports = self.graph.neighbors_right(index)  # port j -> (left block, left port)
        out = np.zeros(p.d, dtype=np.int64)
        block_values: dict[int, np.ndarray] = {}
        line_cache: dict = {}
        for j in range(p.d):
            u, left_port = int(ports[j, 0]), int(ports[j, 1])
            if u not in block_values:
                lam = np.zeros((bt, self.inner.alphabet.length), dtype=np.int64)
                for r in range(bt):
                    i_w = u * bt + r
                    if i_w < p.n_w:
                        lam[r] = self._majority_correct(view, i_w, rng, line_cache)
                f_msg = self._pack_lambda_block(lam)
                block_values[u] = self.rs.encode(f_msg)
            out[j] = block_values[u][left_port]
        return out

    def _pack_lambda_block(self, lam: np.ndarray) -> np.ndarray:
        k_in = self.inner.alphabet.field.k
        packed = np.zeros(lam.shape[0], dtype=np.int64)
        for slot in range(self.inner.alphabet.length):
            packed |= lam[:, slot] << (slot * k_in)
        grouped = packed.reshape(-1, self.params.t)
        out = np.zeros(grouped.shape[0], dtype=np.int64)
        for u in range(self.params.t):
            out |= grouped[:, u] << (u * self.params.lambda_bits)
        return out

    # -- local testing ---------------------------------------------------------------------

    def emulated_inner_test(self, oracle: QueryCountingOracle, rng: np.random.Generator,
                            view: _InnerWordView | None = None) -> bool:
        """One run of the inner tester over the emulated word; rejects on any
        invalid or erased block ('?' semantics)."""
        if not self.supports_testing:
            raise ValueError("tester available only in ltc mode")
        if view is None:
            view = _InnerWordView(self, oracle, "test")
        try:
            return bool(self.inner.local_test(view, rng))
        except _BlockReject:
            return False

    def local_test(self, oracle: QueryCountingOracle, rng: np.random.Generator) -> bool:
        """Amplified tester: ceil(4/rho) independent emulated runs, rejecting
        as soon as one rejects; rho = min(1/(2btd), delta_W/2)."""
        view = _InnerWordView(self, oracle, "test")
        for _ in range(self.test_repetitions):
            if not self.emulated_inner_test(oracle, rng, view):
                return False
        return True

    def codeword_to_bytes(self, word: np.ndarray) -> bytes:
        """n symbols of d field elements each, in coordinate order."""
        word = np.asarray(word, dtype=np.int64)
        out = bytearray()
        for row in word:
            for v in row:
                out += self.field.element_to_bytes(int(v))
        return bytes(out)

    def codeword_from_bytes(self, raw: bytes) -> np.ndarray:
        size = self.field.element_size_bytes
        d = self.params.d
        if len(raw) != size * d * self.block_length:
            raise ValueError("serialized codeword has the wrong length")
        flat = [self.field.element_from_bytes(raw[i * size : (i + 1) * size])
                for i in range(d * self.block_length)]
        return np.asarray(flat, dtype=np.int64).reshape(self.block_length, d)

    def descriptor(self) -> dict:
        out = {
            "params": self.params.to_json(),
            "field": self.field.to_json(),
            "rate": str(self.rate),
            "distance_lower_bound": str(self.distance_lower_bound),
            "inner": self.inner.code_id,
            "sampler": self.graph.header_json(),
            "inner_repetitions": self.inner_repetitions,
            "test_repetitions": self.test_repetitions,
        }
        if self.cert_report is not None:
            out["sampler_certification"] = self.cert_report.to_dict()
        return out


class RsFallbackCode(LocalCode):
    """Plain Reed-Solomon stand-in for inner codes too short to amplify.

    The inner codeword's symbols are packed into field elements and carried
    as the message of one Reed-Solomon block of the same length; locality is
    trivial (read everything), which stays within the transform's stated
    query budget precisely because this mode only triggers for tiny codes.
    """

    def __init__(self, inner: LocalCode, params: AmplifierParams):
        if params.mode != RS_FALLBACK:
            raise ValueError("params are not in fallback mode")
        self.inner = inner
        self.params = params
        lambda_bits = params.lambda_bits
        n_w = params.n_w
        k = int(n_w * (1 - 2 * params.tau)) + 1
        # the field must cover the block length and be wide enough that the
        # packed inner codeword fits inside the message space
        t = 1
        while (1 << (lambda_bits * t)) < n_w or -(-n_w // t) > k:
            t += 1
            if lambda_bits * t > 32:
                raise ParameterError(
                    "fallback-rate",
                    f"no field up to 2^32 packs {n_w} symbols into {k} message slots",
                )
        self.t = t
        self.field = BinaryField(lambda_bits * t)
        self.rs = ReedSolomonCode(self.field, n_w, k)
        self.code_id = f"rs-fallback-{inner.code_id}"
        self.block_length = n_w
        self.alphabet = Alphabet(self.field, 1)
        self.rate = Fraction(inner.rate) * inner.alphabet.bits / self.field.k
        self.distance_lower_bound = 2 * params.tau
        self.correct_radius = params.tau
        self.query_budget_correct = n_w
        self.query_budget_test = n_w

    def _pack(self, w: np.ndarray) -> np.ndarray:
        k_in = self.inner.alphabet.field.k
        packed = np.zeros(self.params.n_w, dtype=np.int64)
        for slot in range(self.inner.alphabet.length):
            packed |= w[:, slot] << (slot * k_in)
        pad = -len(packed) % self.t
        packed = np.concatenate([packed, np.zeros(pad, dtype=np.int64)])
        grouped = packed.reshape(-1, self.t)
        out = np.zeros(grouped.shape[0], dtype=np.int64)
        for u in range(self.t):
            out |= grouped[:, u] << (u * self.params.lambda_bits)
        return out

    def amplify_encode(self, w: np.ndarray) -> np.ndarray:
        symbols = self._pack(np.asarray(w, dtype=np.int64))
        message = np.zeros(self.rs.k, dtype=np.int64)
        message[: len(symbols)] = symbols
        return self.rs.encode(message).reshape(-1, 1)

    def encode(self, message: np.ndarray) -> np.ndarray:
        return self.amplify_encode(self.inner.encode(message))

    def random_message(self, rng: np.random.Generator) -> np.ndarray:
        return self.inner.random_message(rng)

    def local_correct(self, oracle: QueryCountingOracle, index: int,
                      rng: np.random.Generator) -> np.ndarray:
        word = oracle.read_many(np.arange(self.block_length))[:, 0]
        decoded = self.rs.decode_unique(word)
        if decoded is None:
            raise CorrectFailure("no codeword within the unique decoding radius")
        return self.rs.encode(decoded)[index : index + 1]

    def local_test(self, oracle: QueryCountingOracle, rng: np.random.Generator) -> bool:
        word = oracle.read_many(np.arange(self.block_length))[:, 0]
        return self.rs.is_codeword(word)


class _ErasedQuery(Exception):
    pass


class _ErasureTrap:
    """Oracle wrapper that turns any read of an erased coordinate into a reject."""

    def __init__(self, oracle: QueryCountingOracle):
        self.oracle = oracle
        self.count = 0
        self.log = None

    def read_many(self, indices) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        self.count += len(idx)
        if self.oracle.any_erased(idx):
            raise _ErasedQuery()
        return self.oracle.read_many(idx)

    def read(self, i: int) -> np.ndarray:
        return self.read_many(np.array([i]))[0]

    def is_erased(self, i) -> bool:
        return False

    def any_erased(self, indices) -> bool:
        return False


def erasure_rejecting_test(inner: LocalCode, oracle: QueryCountingOracle,
                           rng: np.random.Generator) -> bool:
    """Run a code's tester over a word with erasures, rejecting on any erased read."""
    try:
        return bool(inner.local_test(_ErasureTrap(oracle), rng))
    except _ErasedQuery:
        return False


def build_amplified(
    inner: LocalCode,
    kind: str,
    target,
    eps,
    sampler: SamplerGraph | int | None = None,
    sampler_seed: int = 0,
    certify_trials: int = 2000,
    certify_seed: int = 0,
    allow_uncertified: bool = False,
) -> AmplifiedCode | RsFallbackCode:
    """Derive parameters, build (or take) the sampler, certify, assemble.

    ``sampler`` is a ready SamplerGraph or a degree for a seeded-random
    build.  Certification runs against (inner_radius, eps/2); a failed
    certificate raises unless ``allow_uncertified`` (algebra-only uses).
    """
    if isinstance(sampler, SamplerGraph):
        d = sampler.d
    elif isinstance(sampler, int):
        d = sampler
    else:
        raise ValueError("sampler must be a SamplerGraph or a degree")
    params = derive_parameters(inner, kind, target, eps, d)
    if params.mode == RS_FALLBACK:
        return RsFallbackCode(inner, params)
    graph = sampler if isinstance(sampler, SamplerGraph) else build_seeded_random(
        params.n_blocks, d, sampler_seed
    )
    report = None
    if certify_trials > 0:
        sp = SamplerParams(float(params.inner_radius), float(params.eps / 2), graph.n)
        report = graph.certify(sp, certify_trials, certify_seed)
        if not report.passed and not allow_uncertified:
            raise ParameterError(
                "sampler-certification",
                f"sampler failed ({report.max_violation_fraction:.4f} > alpha)",
            )
    return AmplifiedCode(inner, params, graph, report)

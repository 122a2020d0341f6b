"""Shared interface for codes with locality, plus the measurement harness.

A word over an alphabet F^L is a (block_length, L) int64 array.  Oracles
wrap a fixed word and count every read; channels corrupt an exact number
of symbol positions deterministically from a seed.  The trial runners
measure corrector success rates and tester accept/reject rates against a
code's declared contract and query budgets, never the reverse.
"""

from __future__ import annotations

import csv
import io
import json
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .gf import BinaryField


class CorrectFailure(Exception):
    """A local corrector could not complete; signals error rate above contract."""


class ConstructionFailure(Exception):
    """A construction search did not reach the requested parameters."""


@dataclass(frozen=True)
class Alphabet:
    """Symbols are length-``length`` vectors over ``field``."""

    field: BinaryField
    length: int = 1

    @property
    def bits(self) -> int:
        return self.field.k * self.length

    @property
    def size(self) -> int:
        return 1 << self.bits


class LocalCode(ABC):
    """Uniform surface shared by every code family in this package.

    Implementations set ``code_id``, ``block_length``, ``alphabet``,
    ``rate`` and ``distance_lower_bound`` (exact fractions), and whichever
    of the locality contracts they support:

    * ``correct_radius`` plus ``local_correct`` for correctable codes, with
      ``query_budget_correct`` an upper bound the harness asserts,
    * ``local_test`` for testable codes, with ``query_budget_test``.
    """

    code_id: str
    block_length: int
    alphabet: Alphabet
    rate: Fraction
    distance_lower_bound: Fraction
    correct_radius: Optional[Fraction] = None
    query_budget_correct: Optional[int] = None
    query_budget_test: Optional[int] = None

    @abstractmethod
    def encode(self, message: np.ndarray) -> np.ndarray:
        """Map a message to a (block_length, alphabet.length) word."""

    @abstractmethod
    def random_message(self, rng: np.random.Generator) -> np.ndarray:
        ...

    def random_codeword(self, rng: np.random.Generator) -> np.ndarray:
        return self.encode(self.random_message(rng))

    def local_correct(self, oracle: "QueryCountingOracle", index: int,
                      rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError(f"{self.code_id} exposes no local corrector")

    def local_test(self, oracle: "QueryCountingOracle", rng: np.random.Generator) -> bool:
        raise NotImplementedError(f"{self.code_id} exposes no local tester")

    @property
    def supports_correction(self) -> bool:
        return type(self).local_correct is not LocalCode.local_correct

    @property
    def supports_testing(self) -> bool:
        return type(self).local_test is not LocalCode.local_test


class QueryCountingOracle:
    """Read-only access to a word, counting every symbol read.

    Optionally keeps the full query log.  The backing word is never
    mutated; erasures (when present) are carried in a parallel mask.
    """

    def __init__(self, word: np.ndarray, log_queries: bool = False,
                 erased: np.ndarray | None = None):
        self.word = np.asarray(word, dtype=np.int64)
        if self.word.ndim != 2:
            raise ValueError("oracle word must be a (n, L) array")
        self.count = 0
        self.log: list[int] | None = [] if log_queries else None
        self._erased = erased

    @property
    def block_length(self) -> int:
        return self.word.shape[0]

    def read(self, index: int) -> np.ndarray:
        self.count += 1
        if self.log is not None:
            self.log.append(int(index))
        return self.word[index].copy()

    def read_many(self, indices: Sequence[int]) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        self.count += len(idx)
        if self.log is not None:
            self.log.extend(int(i) for i in idx)
        return self.word[idx].copy()

    def is_erased(self, index: int) -> bool:
        return bool(self._erased is not None and self._erased[index])

    def any_erased(self, indices: Sequence[int]) -> bool:
        if self._erased is None:
            return False
        return bool(self._erased[np.asarray(indices, dtype=np.int64)].any())


RANDOM_SYMBOLS = "random-symbols"
ADVERSARIAL_GREEDY = "adversarial-greedy"
BURST_BLOCK = "burst-block"
ERASURES = "erasures"


@dataclass(frozen=True)
class CorruptionChannel:
    """Corrupts exactly floor(rate * n) distinct symbol positions.

    Deterministic given ``seed``.  ``adversarial-greedy`` aims its budget at
    the positions a sampled set of corrector runs queried most often;
    ``erasures`` marks positions erased instead of rewriting them (used for
    tester diagnostics only).
    """

    kind: str
    rate: float
    seed: int
    probe_runs: int = 8

    def corrupted_count(self, n: int) -> int:
        return int(self.rate * n)

    def _positions(self, n: int, rng: np.random.Generator,
                   code: LocalCode | None, word: np.ndarray) -> np.ndarray:
        m = self.corrupted_count(n)
        if self.kind in (RANDOM_SYMBOLS, ERASURES):
            return rng.choice(n, size=m, replace=False)
        if self.kind == BURST_BLOCK:
            start = int(rng.integers(0, n))
            return (start + np.arange(m)) % n
        if self.kind == ADVERSARIAL_GREEDY:
            if code is None or not code.supports_correction:
                raise ValueError("adversarial-greedy channel needs a correctable code")
            tally = np.zeros(n, dtype=np.int64)
            for _ in range(self.probe_runs):
                oracle = QueryCountingOracle(word, log_queries=True)
                i = int(rng.integers(0, n))
                try:
                    code.local_correct(oracle, i, rng)
                except CorrectFailure:
                    pass
                np.add.at(tally, np.asarray(oracle.log, dtype=np.int64), 1)
            # most-queried positions first; ties broken by index for determinism
            order = np.lexsort((np.arange(n), -tally))
            return order[:m]
        raise ValueError(f"unknown channel kind {self.kind!r}")

    def apply(self, word: np.ndarray, code: LocalCode | None = None,
              field_order: int | None = None
              ) -> tuple[np.ndarray, np.ndarray | None, np.ndarray]:
        """Returns (corrupted word, erasure mask or None, corrupted positions)."""
        word = np.asarray(word, dtype=np.int64)
        n, width = word.shape
        rng = np.random.default_rng(self.seed)
        pos = np.sort(self._positions(n, rng, code, word))
        out = word.copy()
        if self.kind == ERASURES:
            mask = np.zeros(n, dtype=bool)
            mask[pos] = True
            return out, mask, pos
        if field_order is None:
            if code is None:
                raise ValueError("need a code or field_order to draw replacement symbols")
            field_order = code.alphabet.field.order
        for i in pos:
            while True:
                repl = rng.integers(0, field_order, size=width, dtype=np.int64)
                if not np.array_equal(repl, word[i]):
                    out[i] = repl
                    break
        return out, None, pos

    def describe(self) -> str:
        return f"{self.kind}(rate={self.rate}, seed={self.seed})"


@dataclass
class TrialReport:
    """Outcome of a batch of corrector or tester trials."""

    code_id: str
    channel: str
    rate: float
    trials: int
    successes: int
    mean_queries: float
    max_queries: int
    budget: Optional[int]
    per_coordinate: dict = dc_field(default_factory=dict)

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    CSV_COLUMNS = ["code_id", "channel", "rate", "trials", "successes",
                   "mean_queries", "max_queries", "budget"]

    def csv_row(self) -> list:
        return [self.code_id, self.channel, self.rate, self.trials, self.successes,
                f"{self.mean_queries:.3f}", self.max_queries,
                "" if self.budget is None else self.budget]

    def to_json(self) -> dict:
        return {
            "code_id": self.code_id, "channel": self.channel, "rate": self.rate,
            "trials": self.trials, "successes": self.successes,
            "success_rate": self.success_rate, "mean_queries": self.mean_queries,
            "max_queries": self.max_queries, "budget": self.budget,
            "per_coordinate": {str(k): v for k, v in self.per_coordinate.items()},
        }


def reports_to_csv(reports: Sequence[TrialReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TrialReport.CSV_COLUMNS)
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def thread_count() -> int:
    raw = os.environ.get("LOCALITY_CODES_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def run_correction_trials(
    code: LocalCode,
    channel: CorruptionChannel,
    trials: int,
    seed: int,
    coordinate: int | str = "random",
) -> TrialReport:
    """Corrector success statistics against the true codeword coordinate.

    Each trial draws a fresh codeword, corrupts it through the channel
    (re-seeded per trial), corrects one coordinate and compares with the
    truth.  ``coordinate`` is a fixed index or "random".
    """
    if not code.supports_correction:
        raise ValueError(f"{code.code_id} has no local corrector")
    successes = 0
    queries = []
    per_coord: dict[int, list[int]] = {}
    workers = thread_count()

    def one(t: int) -> tuple[int, bool, int]:
        rng = _trial_rng(seed, t)
        word = code.random_codeword(rng)
        chan = CorruptionChannel(channel.kind, channel.rate, seed=channel.seed + t,
                                 probe_runs=channel.probe_runs)
        corrupted, _, _ = chan.apply(word, code)
        i = int(rng.integers(0, code.block_length)) if coordinate == "random" else int(coordinate)
        oracle = QueryCountingOracle(corrupted)
        try:
            got = code.local_correct(oracle, i, rng)
            ok = bool(np.array_equal(got, word[i]))
        except CorrectFailure:
            ok = False
        return i, ok, oracle.count

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(t) for t in range(trials)]

    for i, ok, q in results:
        successes += ok
        queries.append(q)
        per_coord.setdefault(i, [0, 0])
        per_coord[i][0] += ok
        per_coord[i][1] += 1

    return TrialReport(
        code_id=code.code_id,
        channel=channel.describe(),
        rate=channel.rate,
        trials=trials,
        successes=successes,
        mean_queries=float(np.mean(queries)) if queries else 0.0,
        max_queries=int(np.max(queries)) if queries else 0,
        budget=code.query_budget_correct,
        per_coordinate={k: tuple(v) for k, v in per_coord.items()},
    )


def run_test_trials(
    code: LocalCode,
    channel: CorruptionChannel | None,
    trials: int,
    seed: int,
) -> TrialReport:
    """Tester accept/reject statistics.

    With no channel the word is a clean codeword and ``successes`` counts
    accepts; with a channel ``successes`` counts rejects of the corrupted
    word.
    """
    if not code.supports_testing:
        raise ValueError(f"{code.code_id} has no local tester")
    successes = 0
    queries = []

    def one(t: int) -> tuple[bool, int]:
        rng = _trial_rng(seed, t)
        word = code.random_codeword(rng)
        erased = None
        if channel is not None:
            chan = CorruptionChannel(channel.kind, channel.rate, seed=channel.seed + t,
                                     probe_runs=channel.probe_runs)
            word, erased, _ = chan.apply(word, code)
        oracle = QueryCountingOracle(word, erased=erased)
        verdict = code.local_test(oracle, rng)
        hit = verdict if channel is None else not verdict
        return hit, oracle.count

    workers = thread_count()
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(t) for t in range(trials)]

    for hit, q in results:
        successes += hit
        queries.append(q)

    return TrialReport(
        code_id=code.code_id,
        channel="none" if channel is None else channel.describe(),
        rate=0.0 if channel is None else channel.rate,
        trials=trials,
        successes=successes,
        mean_queries=float(np.mean(queries)) if queries else 0.0,
        max_queries=int(np.max(queries)) if queries else 0,
        budget=code.query_budget_test,
    )


class MessageDecoder:
    """Local decoding of message coordinates through a systematic encoder.

    Message coordinate ``i`` lives in a fixed (word position, component)
    slot; decoding locally corrects that position and projects the slot,
    so the query complexity equals the corrector's.
    """

    def __init__(self, code: LocalCode):
        info = getattr(code, "information_slots", None)
        if info is None or not code.supports_correction:
            raise ValueError(
                f"{code.code_id} has no systematic information set with a local corrector"
            )
        self.code = code
        self.slots = info() if callable(info) else info

    @property
    def message_length(self) -> int:
        return len(self.slots)

    def decode_coordinate(self, oracle: QueryCountingOracle, i: int,
                          rng: np.random.Generator) -> int:
        position, component = self.slots[i]
        symbol = self.code.local_correct(oracle, position, rng)
        return int(symbol[component])


def as_local_decoder(code: LocalCode) -> MessageDecoder:
    return MessageDecoder(code)


def dump_json(obj, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")

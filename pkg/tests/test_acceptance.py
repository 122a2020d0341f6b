"""Acceptance suite: one test per criterion, each printing a PASS line.

These are the package's exit criteria.  Statistical margins are fixed at
three binomial sigmas; query budgets and algebraic identities are exact.
Each criterion enforces its own wall-clock cap.
"""

import time
from fractions import Fraction
from math import comb, sqrt

import numpy as np
import pytest

from localcodes.amplifier import build_amplified
from localcodes.api import (
    ADVERSARIAL_GREEDY,
    ERASURES,
    RANDOM_SYMBOLS,
    CorruptionChannel,
    QueryCountingOracle,
    as_local_decoder,
    run_correction_trials,
)
from localcodes.concat import ConcatenatedCode, build_inner_greedy
from localcodes.exhaustive import EnumeratedCode
from localcodes.gf import BinaryField
from localcodes.multiplicity import MultiplicityCode
from localcodes.rs import ReedSolomonCode
from localcodes.sampler import SamplerParams, build_explicit
from localcodes.schedule import check_schedules, fact_power_approximation
from localcodes.tensor import TensorCode

F8 = BinaryField(3)
F16 = BinaryField(4)
F32 = BinaryField(5)
F64 = BinaryField(6)
F256 = BinaryField(8)


def announce(num: int, text: str) -> None:
    print(f"\n[criterion {num:2d}] PASS  {text}")


def three_sigma(p: float, trials: int) -> float:
    return 3 * sqrt(max(p * (1 - p), 1e-12) / trials)


@pytest.fixture(scope="module")
def mult_desk():
    """The order-2 bivariate instance used by criteria 3 and 8."""
    return MultiplicityCode(F64, m=2, s=2, d=96)


@pytest.fixture(scope="module")
def amplified_lcc():
    """Desk amplified corrector: order-1 bivariate inner, degree-24 sampler."""
    inner = MultiplicityCode(F32, m=2, s=1, d=20)
    code = build_amplified(
        inner, "lcc", Fraction(15, 100), Fraction(62, 100),
        sampler=24, sampler_seed=11, certify_trials=10_000, certify_seed=5,
    )
    return inner, code


@pytest.fixture(scope="module")
def amplified_ltc():
    """Desk amplified tester: three-fold tensor inner, degree-24 sampler."""
    inner = TensorCode(ReedSolomonCode(F16, 16, 8), 3)
    code = build_amplified(
        inner, "ltc", Fraction(25, 100), Fraction(60, 100),
        sampler=24, sampler_seed=13, certify_trials=10_000, certify_seed=6,
    )
    return inner, code


def test_criterion_1_reed_solomon_exactness():
    start = time.time()
    code = ReedSolomonCode(F8, 7, 3)
    table = EnumeratedCode(3, 8, lambda msgs: np.stack([code.encode(m) for m in msgs])[:, :, None])
    assert table.min_distance() == 5 == code.n - code.k + 1

    # unique decoding under every single-error pattern: all positions, all
    # error values, over a batch of seeded messages plus the zero codeword
    rng = np.random.default_rng(101)
    messages = [np.zeros(3, dtype=np.int64)] + [F8.random_elements(rng, 3) for _ in range(15)]
    failures = 0
    for msg in messages:
        word = code.encode(msg)
        if not np.array_equal(code.decode_unique(word), msg):
            failures += 1
        for pos in range(7):
            for err in range(1, 8):
                received = word.copy()
                received[pos] ^= err
                if not np.array_equal(code.decode_unique(received), msg):
                    failures += 1
    assert failures == 0

    big = ReedSolomonCode(F256, 64, 32)
    for t in range(1000):
        trng = np.random.default_rng([102, t])
        msg = F256.random_elements(trng, 32)
        word = big.encode(msg)
        weight = int(trng.integers(0, big.unique_radius + 1))
        for pos in trng.choice(64, size=weight, replace=False):
            word[pos] ^= int(trng.integers(1, 256))
        if not np.array_equal(big.decode_unique(word), msg):
            failures += 1
    assert failures == 0
    elapsed = time.time() - start
    assert elapsed < 10
    announce(1, f"RS(7,3) distance 5 exact; zero decode failures; {elapsed:.1f}s")


def test_criterion_2_explicit_sampler():
    start = time.time()
    params = SamplerParams(0.1, 0.1, 100)
    graph = build_explicit(params)
    lam = graph.second_singular_value()
    assert lam is not None and lam <= params.spectral_target
    report = graph.certify(params, trials=10_000, rng_seed=7)
    assert report.max_violation_fraction <= params.alpha
    elapsed = time.time() - start
    assert elapsed < 60
    announce(2, f"lambda2 = {lam:.4f} <= {params.spectral_target:.4f}; "
                f"max violation {report.max_violation_fraction:.4f} over 10^4 subsets; "
                f"{elapsed:.1f}s")


def test_criterion_3_multiplicity_code(mult_desk):
    start = time.time()
    code = mult_desk
    q = 64
    assert code.field_condition_ok  # 64 >= max(20, 54, 36)
    assert code.rate == Fraction(comb(98, 2), comb(3, 2) * 4096)

    weight_floor = float(code.distance_lower_bound) * code.block_length
    rng = np.random.default_rng(103)
    violations = 0
    for _ in range(10_000):
        msg = code.random_message(rng)
        if not msg.any():
            continue
        word = code.encode(msg)
        if int((word != 0).any(axis=1).sum()) < weight_floor:
            violations += 1
    assert violations == 0

    successes = 0
    max_queries = 0
    trials = 500
    for t in range(trials):
        trng = np.random.default_rng([104, t])
        word = code.encode(code.random_message(trng))
        channel = CorruptionChannel(RANDOM_SYMBOLS, float(code.correct_radius), seed=9000 + t)
        corrupted, _, _ = channel.apply(word, code)
        index = int(trng.integers(0, code.block_length))
        oracle = QueryCountingOracle(corrupted)
        got = code.local_correct(oracle, index, trng)
        successes += bool(np.array_equal(got, word[index]))
        max_queries = max(max_queries, oracle.count)
        assert oracle.count <= code.num_directions * q
    rate = successes / trials
    assert rate >= 2 / 3
    elapsed = time.time() - start
    assert elapsed < 600
    announce(3, f"rate {code.rate}; 10^4 weights ok; correction {rate:.3f} >= 2/3 "
                f"(expected >= 0.9: {rate >= 0.9}); max queries {max_queries} <= {code.num_directions * q}; "
                f"{elapsed:.0f}s")


def test_criterion_4_tensor_code():
    start = time.time()
    code = TensorCode(ReedSolomonCode(F8, 8, 4), 3)

    rng = np.random.default_rng(105)
    rejections = 0
    for block in range(20):
        word = code.random_codeword(rng)
        oracle = QueryCountingOracle(word)
        for _ in range(5000):
            if not code.plane_test(oracle, rng):
                rejections += 1
    assert rejections == 0

    word = code.random_codeword(rng)
    word[333, 0] ^= 5
    exact = code.exact_single_trial_rejection(word)
    trials = 10_000
    hits = 0
    for t in range(trials):
        trng = np.random.default_rng([106, t])
        hits += not code.plane_test(QueryCountingOracle(word), trng)
    empirical = hits / trials
    tol = three_sigma(float(exact), trials)
    assert abs(empirical - float(exact)) <= tol

    levels = [0.01, 0.02, 0.05, 0.1]
    level_rates = []
    for li, level in enumerate(levels):
        rej = 0
        for t in range(10_000):
            trng = np.random.default_rng([107 + li, t])
            cw = code.random_codeword(trng)
            chan = CorruptionChannel(RANDOM_SYMBOLS, level, seed=20_000 + 100 * li + t)
            corrupted, _, _ = chan.apply(cw, code)
            rej += not code.plane_test(QueryCountingOracle(corrupted), trng)
        level_rates.append(rej / 10_000)
    assert level_rates == sorted(level_rates)
    elapsed = time.time() - start
    assert elapsed < 300
    announce(4, f"completeness 0/10^5; single-flip {empirical:.4f} vs exact {float(exact):.4f} "
                f"(tol {tol:.4f}); monotone {level_rates}; {elapsed:.0f}s")


def test_criterion_5_amplifier_algebra():
    start = time.time()
    # 16-ary inner alphabet, degree-64 sampler, working tau = 0.2, eps = 0.05
    inner = TensorCode(ReedSolomonCode(F16, 12, 6), 4)  # block 20736 = 288 * 72
    code = build_amplified(inner, "ltc", Fraction(4, 10), Fraction(5, 100),
                           sampler=64, sampler_seed=17, certify_trials=0)
    p = code.params
    assert (p.b, p.t, p.d) == (36, 2, 64)
    assert code.field.k == 8
    assert p.mode == "amplified"
    assert code.rate == Fraction(inner.rate) * Fraction(36, 64)
    assert code.rate >= Fraction(inner.rate) * Fraction(55, 100)

    mismatches = 0
    for t in range(1000):
        rng = np.random.default_rng([108, t])
        w = inner.encode(inner.random_message(rng))
        if not np.array_equal(code.amplify_decode(code.amplify_encode(w)), w):
            mismatches += 1
    assert mismatches == 0
    elapsed = time.time() - start
    assert elapsed < 30
    announce(5, f"b=36 t=2 F=GF(2^8); rate {code.rate} = r_W*36/64; "
                f"10^3 roundtrips exact; {elapsed:.0f}s")


def test_criterion_6_end_to_end_lcc(amplified_lcc):
    start = time.time()
    inner, code = amplified_lcc
    assert code.cert_report is not None and code.cert_report.passed
    results = {}
    for kind, probe in ((RANDOM_SYMBOLS, 8), (ADVERSARIAL_GREEDY, 4)):
        channel = CorruptionChannel(kind, float(code.correct_radius), seed=300, probe_runs=probe)
        report = run_correction_trials(code, channel, trials=300, seed=301)
        assert report.success_rate >= 2 / 3
        assert report.max_queries <= code.query_budget_correct
        results[kind] = (report.success_rate, report.max_queries)
    elapsed = time.time() - start
    assert elapsed < 1800
    announce(6, f"random {results[RANDOM_SYMBOLS][0]:.3f}, adversarial "
                f"{results[ADVERSARIAL_GREEDY][0]:.3f} >= 2/3 over 300 trials each; "
                f"queries <= {code.query_budget_correct}; {elapsed:.0f}s")


def test_criterion_7_end_to_end_ltc(amplified_ltc):
    start = time.time()
    inner, code = amplified_ltc
    assert code.cert_report is not None and code.cert_report.passed

    # completeness: the amplified tester is a conjunction of emulated runs,
    # so zero rejections across 10^4 independent runs pins it at exactly 1
    rejections = 0
    for block in range(20):
        rng = np.random.default_rng([109, block])
        word = code.amplify_encode(inner.encode(inner.random_message(rng)))
        oracle = QueryCountingOracle(word)
        for _ in range(500):
            if not code.emulated_inner_test(oracle, rng):
                rejections += 1
    assert rejections == 0

    # soundness at exactly-known channel distances (all far below half the
    # code distance, so the corrupted fraction is the true distance)
    sound = {}
    for li, level in enumerate((0.02, 0.05, 0.1)):
        trials = 300
        rejected = 0
        for t in range(trials):
            rng = np.random.default_rng([110 + li, t])
            word = code.amplify_encode(inner.encode(inner.random_message(rng)))
            chan = CorruptionChannel(RANDOM_SYMBOLS, level, seed=40_000 + 1000 * li + t)
            corrupted, _, pos = chan.apply(word, code)
            delta = len(pos) / code.block_length
            if not code.local_test(QueryCountingOracle(corrupted), rng):
                rejected += 1
        rate = rejected / trials
        assert rate >= delta - three_sigma(delta, trials)
        sound[level] = rate

    # erased blocks always reject when queried
    rng = np.random.default_rng(111)
    word = code.amplify_encode(inner.encode(inner.random_message(rng)))
    chan = CorruptionChannel(ERASURES, 0.05, seed=50_000)
    z, mask, pos = chan.apply(word, code)
    from localcodes.amplifier import _BlockReject, _InnerWordView

    view = _InnerWordView(code, QueryCountingOracle(z, erased=mask), "test")
    bt = code.params.block_symbols
    touched = 0
    for u in range(code.params.n_blocks):
        ports = code.graph.neighbors_left(u)
        if mask[ports[:, 0]].any():
            touched += 1
            with pytest.raises(_BlockReject):
                view.read_many(np.array([u * bt]))
    assert touched > 0
    for t in range(20):
        trng = np.random.default_rng([112, t])
        assert not code.local_test(QueryCountingOracle(z, erased=mask), trng)
    elapsed = time.time() - start
    assert elapsed < 1800
    announce(7, f"completeness 1.0 over 10^4 runs; rejection {sound}; "
                f"{touched} erased blocks all reject on query; {elapsed:.0f}s")


def test_criterion_8_binary_concatenation(mult_desk):
    start = time.time()
    inner = build_inner_greedy(15, 8, 4)
    assert inner.min_dist >= 4

    code = ConcatenatedCode(mult_desk, inner)
    successes = 0
    max_queries = 0
    trials = 300
    for t in range(trials):
        rng = np.random.default_rng([113, t])
        word = code.encode(code.random_message(rng))
        chan = CorruptionChannel(RANDOM_SYMBOLS, float(code.correct_radius), seed=60_000 + t)
        z, _, _ = chan.apply(word, code)
        index = int(rng.integers(0, code.block_length))
        oracle = QueryCountingOracle(z)
        got = code.local_correct(oracle, index, rng)
        successes += got[0] == word[index, 0]
        max_queries = max(max_queries, oracle.count)
    rate = successes / trials
    assert rate >= 2 / 3

    from localcodes.cli import _RsAdapter

    tiny = ConcatenatedCode(_RsAdapter(ReedSolomonCode(F8, 7, 3)), build_inner_greedy(7, 4, 3))
    table = EnumeratedCode(3, 8, lambda msgs: np.stack([tiny.encode(m) for m in msgs]))
    assert table.min_distance() >= 5 * 3
    elapsed = time.time() - start
    assert elapsed < 600
    announce(8, f"(15,8) inner d={inner.min_dist}; bit correction {rate:.3f} >= 2/3 at "
                f"tau_bin={float(code.correct_radius):.4f}; tiny distance >= 15; {elapsed:.0f}s")


def test_criterion_9_schedule_check():
    start = time.time()
    rows = check_schedules(40)
    assert all(r["ok"] for r in rows)
    assert rows[-1]["log2_n"] == 40
    fact = fact_power_approximation(0.5, 1)
    assert fact["ok"] and fact["lhs"] == 0.5 and fact["rhs"] == 0.875
    elapsed = time.time() - start
    assert elapsed < 10
    announce(9, f"rate and distance chains verified on {len(rows)} grid points up to 2^40 "
                f"at 1e-12 slack; {elapsed:.1f}s")


def test_criterion_10_ldc_adapter():
    start = time.time()
    code = MultiplicityCode(F64, m=2, s=2, d=32)
    assert code.field_condition_ok
    decoder = as_local_decoder(code)
    assert decoder.message_length == code.dimension

    rng = np.random.default_rng(114)
    msg = code.random_message(rng)
    word = code.systematic_encode(msg)
    oracle = QueryCountingOracle(word)
    for i in range(decoder.message_length):
        assert decoder.decode_coordinate(oracle, i, rng) == int(msg[i])

    successes = 0
    trials = 300
    for t in range(trials):
        trng = np.random.default_rng([115, t])
        message = code.random_message(trng)
        cw = code.systematic_encode(message)
        chan = CorruptionChannel(RANDOM_SYMBOLS, float(code.correct_radius), seed=70_000 + t)
        z, _, _ = chan.apply(cw, code)
        i = int(trng.integers(0, decoder.message_length))
        o = QueryCountingOracle(z)
        try:
            successes += decoder.decode_coordinate(o, i, trng) == int(message[i])
        except Exception:
            pass
        assert o.count <= code.query_budget_correct
    rate = successes / trials
    assert rate >= 2 / 3
    elapsed = time.time() - start
    announce(10, f"exhaustive clean decode over {decoder.message_length} coordinates; "
                 f"corrupted success {rate:.3f} >= 2/3; {elapsed:.0f}s")

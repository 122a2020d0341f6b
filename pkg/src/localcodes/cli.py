"""Command-line front end: build instances, run experiment suites, check schedules.

Configs and instance descriptors are JSON; experiment results are CSV with
one row per trial batch.  Exit codes: 0 success, 1 experiment assertion
failure, 2 invalid config, 3 infeasible parameters.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .amplifier import ParameterError, build_amplified
from .api import (
    RANDOM_SYMBOLS,
    ConstructionFailure,
    CorruptionChannel,
    LocalCode,
    TrialReport,
    reports_to_csv,
    run_correction_trials,
    run_test_trials,
)
from .concat import ConcatenatedCode, build_inner_greedy
from .gf import BinaryField
from .multiplicity import MultiplicityCode
from .rs import ReedSolomonCode
from .sampler import build_complete
from .schedule import check_schedules, rows_to_csv
from .tensor import TensorCode

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_SCHEMA = 2
EXIT_INFEASIBLE = 3


class ConfigError(ValueError):
    pass


def _require_keys(obj: dict, required: set[str], optional: set[str], where: str) -> None:
    keys = set(obj)
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _fraction(value, where: str) -> Fraction:
    try:
        if isinstance(value, str):
            return Fraction(value)
        if isinstance(value, (int, float)):
            return Fraction(value).limit_denominator(10**9)
        if isinstance(value, list) and len(value) == 2:
            return Fraction(int(value[0]), int(value[1]))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: bad fraction {value!r} ({exc})") from exc
    raise ConfigError(f"{where}: bad fraction {value!r}")


class _RsAdapter(LocalCode):
    """Plain Reed-Solomon wrapped in the LocalCode surface (no locality)."""

    def __init__(self, rs: ReedSolomonCode):
        from .api import Alphabet

        self.rs = rs
        self.code_id = f"rs-n{rs.n}-k{rs.k}-gf{rs.field.order}"
        self.block_length = rs.n
        self.alphabet = Alphabet(rs.field, 1)
        self.rate = rs.rate
        self.distance_lower_bound = rs.relative_distance

    def encode(self, message):
        return self.rs.encode(message).reshape(-1, 1)

    def random_message(self, rng):
        return self.rs.field.random_elements(rng, self.rs.k)


def build_code(config: dict, where: str = "config") -> LocalCode:
    """Construct the code a config describes.  Raises ConfigError for schema
    problems and ParameterError/ConstructionFailure for infeasible builds."""
    if not isinstance(config, dict):
        raise ConfigError(f"{where}: expected an object")
    family = config.get("family")
    if family == "rs":
        _require_keys(config, {"family", "field_bits", "n", "k"}, {"seed"}, where)
        field = BinaryField(int(config["field_bits"]))
        return _RsAdapter(ReedSolomonCode(field, int(config["n"]), int(config["k"])))
    if family == "multiplicity":
        _require_keys(config, {"family", "field_bits", "m", "s", "degree"}, {"seed"}, where)
        field = BinaryField(int(config["field_bits"]))
        return MultiplicityCode(field, int(config["m"]), int(config["s"]), int(config["degree"]))
    if family == "tensor":
        _require_keys(
            config, {"family", "field_bits", "base_n", "base_k", "power"}, {"rho_base"}, where
        )
        field = BinaryField(int(config["field_bits"]))
        base = ReedSolomonCode(field, int(config["base_n"]), int(config["base_k"]))
        rho = _fraction(config["rho_base"], where) if "rho_base" in config else None
        return TensorCode(base, int(config["power"]), rho_base=rho)
    if family == "amplified":
        _require_keys(
            config,
            {"family", "kind", "inner", "target", "eps", "sampler"},
            {"certify_trials", "certify_seed", "allow_uncertified"},
            where,
        )
        inner = build_code(config["inner"], where + ".inner")
        sampler_cfg = config["sampler"]
        _require_keys(sampler_cfg, {"mode"}, {"d", "seed", "alpha", "gamma"}, where + ".sampler")
        mode = sampler_cfg["mode"]
        kind = config["kind"]
        if kind not in ("lcc", "ltc"):
            raise ConfigError(f"{where}: kind must be lcc or ltc")
        target = _fraction(config["target"], where)
        eps = _fraction(config["eps"], where)
        if mode == "complete":
            from .amplifier import RS_FALLBACK, AmplifiedCode, RsFallbackCode

            params = _derive_with_complete(inner, kind, target, eps)
            if params.mode == RS_FALLBACK:
                return RsFallbackCode(inner, params)
            graph = build_complete(params.n_blocks)
            return AmplifiedCode(inner, params, graph)
        if mode != "seeded":
            # the explicit construction's degree is astronomically large; it is
            # exercised on its own, not inside amplified instances
            raise ConfigError(f"{where}.sampler: mode must be 'seeded' or 'complete'")
        sampler = int(sampler_cfg["d"])
        seed = int(sampler_cfg.get("seed", 0))
        return build_amplified(
            inner,
            kind,
            target,
            eps,
            sampler=sampler,
            sampler_seed=seed,
            certify_trials=int(config.get("certify_trials", 2000)),
            certify_seed=int(config.get("certify_seed", 0)),
            allow_uncertified=bool(config.get("allow_uncertified", False)),
        )
    if family == "concat":
        _require_keys(
            config, {"family", "outer", "inner_n", "inner_k", "inner_target_dist"}, set(), where
        )
        outer = build_code(config["outer"], where + ".outer")
        inner = build_inner_greedy(
            int(config["inner_n"]), int(config["inner_k"]), int(config["inner_target_dist"])
        )
        return ConcatenatedCode(outer, inner)
    raise ConfigError(f"{where}: unknown family {family!r}")


def _derive_with_complete(inner, kind, target, eps):
    """Complete-bipartite sampler: iterate since its degree equals the side."""
    from .amplifier import derive_parameters

    # the degree of a complete graph equals the number of blocks, which
    # depends on b = b(d); iterate to the fixed point
    d = max(2, inner.block_length // 4)
    for _ in range(64):
        params = derive_parameters(inner, kind, target, eps, d)
        if params.mode == "rs-fallback" or params.n_blocks == d:
            return params
        d = params.n_blocks
    raise ParameterError("complete-sampler", "no fixed point for a complete bipartite sampler")


def describe_code(code: LocalCode) -> dict:
    out = {
        "code_id": code.code_id,
        "block_length": code.block_length,
        "alphabet_bits": code.alphabet.bits,
        "rate": str(code.rate),
        "distance_lower_bound": str(code.distance_lower_bound),
        "correct_radius": None if code.correct_radius is None else str(code.correct_radius),
        "query_budget_correct": code.query_budget_correct,
        "query_budget_test": code.query_budget_test,
    }
    descriptor = getattr(code, "descriptor", None)
    if callable(descriptor):
        out["amplifier"] = descriptor()
    if hasattr(code, "inner") and hasattr(code.inner, "min_dist"):
        out["inner_binary"] = {
            "n": code.inner.n,
            "k": code.inner.k,
            "min_dist": code.inner.min_dist,
        }
    return out


def cmd_build(args) -> int:
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        code = build_code(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (ParameterError, ConstructionFailure, ValueError) as exc:
        print(f"error: infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    instance = {"config": config, "derived": describe_code(code)}
    with open(args.output, "w") as fh:
        json.dump(instance, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {args.output}: {code.code_id}")
    return EXIT_OK


def cmd_schedule_check(args) -> int:
    if args.n_max < 16:
        print("error: grid starts at n = 16", file=sys.stderr)
        return EXIT_SCHEMA
    n_max_log2 = int(math.log2(args.n_max))
    rows = check_schedules(n_max_log2)
    csv_text = rows_to_csv(rows)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    bad = [r for r in rows if not r["ok"]]
    for r in rows:
        print(
            f"n=2^{r['log2_n']}: rate {r['mult_rate_lhs']:.9f} >= {r['mult_rate_rhs']:.9f}"
            f" ok={r['ok']}",
            file=sys.stderr,
        )
    return EXIT_OK if not bad else EXIT_ASSERTION


def _three_sigma(p: float, trials: int) -> float:
    return 3 * math.sqrt(max(p * (1 - p), 1e-12) / trials)


def run_suite(code: LocalCode, suite: str, trials: int, seed: int
              ) -> tuple[list[TrialReport], list[str]]:
    """Run one named experiment suite; returns (reports, failure messages)."""
    failures: list[str] = []
    reports: list[TrialReport] = []
    if suite == "completeness":
        if not code.supports_testing:
            raise ConfigError(f"{code.code_id} has no tester; completeness needs one")
        rep = run_test_trials(code, None, trials, seed)
        reports.append(rep)
        if rep.successes != rep.trials:
            failures.append(f"completeness: {rep.successes}/{rep.trials} accepts")
    elif suite == "lcc-contract":
        if not code.supports_correction:
            raise ConfigError(f"{code.code_id} has no corrector; lcc-contract needs one")
        channel = CorruptionChannel(RANDOM_SYMBOLS, float(code.correct_radius), seed=seed + 1)
        rep = run_correction_trials(code, channel, trials, seed)
        reports.append(rep)
        if rep.success_rate < 2 / 3:
            failures.append(f"lcc-contract: success {rep.success_rate:.3f} < 2/3")
    elif suite == "ltc-soundness":
        if not code.supports_testing:
            raise ConfigError(f"{code.code_id} has no tester; ltc-soundness needs one")
        for rate in (0.02, 0.05):
            if int(rate * code.block_length) < 1:
                continue
            channel = CorruptionChannel(RANDOM_SYMBOLS, rate, seed=seed + 1)
            rep = run_test_trials(code, channel, trials, seed)
            reports.append(rep)
            delta = int(rate * code.block_length) / code.block_length
            floor_rate = delta - _three_sigma(delta, trials)
            if rep.success_rate < floor_rate:
                failures.append(
                    f"ltc-soundness rate={rate}: reject {rep.success_rate:.3f} < {floor_rate:.3f}"
                )
    elif suite == "query-audit":
        if code.supports_correction:
            channel = CorruptionChannel(RANDOM_SYMBOLS, float(code.correct_radius), seed=seed + 1)
            rep = run_correction_trials(code, channel, trials, seed)
            reports.append(rep)
        if code.supports_testing:
            rep = run_test_trials(code, None, trials, seed)
            reports.append(rep)
        for rep in reports:
            if rep.budget is not None and rep.max_queries > rep.budget:
                failures.append(
                    f"query-audit: {rep.max_queries} queries exceeds budget {rep.budget}"
                )
        if not reports:
            raise ConfigError(f"{code.code_id} exposes no local algorithms to audit")
    else:
        raise ConfigError(f"unknown suite {suite!r}")
    return reports, failures


def cmd_experiment(args) -> int:
    try:
        with open(args.instance) as fh:
            instance = json.load(fh)
        config = instance["config"] if "config" in instance else instance
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: cannot read instance: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        code = build_code(config)
        reports, failures = run_suite(code, args.suite, args.trials, args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (ParameterError, ConstructionFailure) as exc:
        print(f"error: infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    csv_text = reports_to_csv(reports)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    for failure in failures:
        print(f"FAIL {failure}", file=sys.stderr)
    return EXIT_OK if not failures else EXIT_ASSERTION


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localcodes",
        description="build and measure locally correctable / testable codes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build an instance from a JSON config")
    p_build.add_argument("-c", "--config", required=True)
    p_build.add_argument("-o", "--output", required=True)
    p_build.set_defaults(func=cmd_build)

    p_sched = sub.add_parser("schedule-check", help="verify the asymptotic schedules")
    p_sched.add_argument("--n-max", type=int, required=True,
                         help="largest block length on the grid (power of two)")
    p_sched.add_argument("-o", "--output", default=None)
    p_sched.set_defaults(func=cmd_schedule_check)

    p_exp = sub.add_parser("experiment", help="run a measurement suite on an instance")
    p_exp.add_argument("-i", "--instance", required=True)
    p_exp.add_argument("-s", "--suite", required=True,
                       choices=["completeness", "lcc-contract", "ltc-soundness", "query-audit"])
    p_exp.add_argument("-o", "--output", default=None)
    p_exp.add_argument("--trials", type=int, default=100)
    p_exp.add_argument("--seed", type=int, default=0)
    p_exp.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

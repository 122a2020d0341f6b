"""High-precision verification of the asymptotic parameter schedules.

The desk-scale experiments cannot reach the regime where the headline
query bounds bite, so the schedules are checked symbolically instead: for
a grid of block lengths the multiplicity-code schedule must meet its rate
bound, the tensor schedule must reproduce its distance chain, and every
step that leans on the power approximation (1-x)^y <= 1 - xy/4 is
re-verified numerically.

All comparisons run at 200-bit precision with an explicit 1e-12 slack.
"""

from __future__ import annotations

import csv
import io

import mpmath as mp

SLACK = mp.mpf("1e-12")
PRECISION_BITS = 200

# exponent ceiling for the multiplicity query expression
# s^m * |F| = 2^(c * sqrt(log n * loglog n)); c equals 3 at log n = 4 and
# decreases toward 3 from below afterwards
QUERY_EXPONENT_CAP = 3.0


def fact_power_approximation(x, y) -> dict:
    """Check (1-x)^y <= 1 - xy/4 for 0 <= xy <= 1."""
    x = mp.mpf(x)
    y = mp.mpf(y)
    lhs = (1 - x) ** y
    rhs = 1 - x * y / 4
    applicable = 0 <= x * y <= 1
    return {
        "x": float(x),
        "y": float(y),
        "lhs": float(lhs),
        "rhs": float(rhs),
        "ok": bool(applicable and lhs <= rhs + SLACK),
    }


def multiplicity_schedule(log2_n: int) -> dict:
    """The sub-constant-distance multiplicity schedule at block length 2^log2_n.

    Field size 2^sqrt(L * LL), m = sqrt(L / LL), s = 2 m^2 L,
    delta = 1 / (2 m L), degree d = s |F| (1 - delta), where L = log2 n.
    Verifies the rate chain
        (1 - m^2/s)(1 - delta)^m >= 1 - 1/L
    and the query-size expression s^m |F| = 2^(c sqrt(L LL)) with c <= 3.
    """
    with mp.workprec(PRECISION_BITS):
        L = mp.mpf(log2_n)
        LL = mp.log(L, 2)
        if LL <= 0:
            raise ValueError("schedule needs log2(n) >= 2")
        m = mp.sqrt(L / LL)
        field_log2 = mp.sqrt(L * LL)
        field = mp.power(2, field_log2)
        s = 2 * m * m * L
        delta = 1 / (2 * m * L)
        d = s * field * (1 - delta)

        rate_lhs = (1 - m * m / s) * (1 - delta) ** m
        rate_rhs = 1 - 1 / L
        rate_ok = rate_lhs >= rate_rhs - SLACK

        query_log2 = m * mp.log(s, 2) + field_log2
        exponent = query_log2 / mp.sqrt(L * LL)
        query_ok = exponent <= QUERY_EXPONENT_CAP + SLACK

        field_condition_ok = (
            field >= 10 * m - SLACK
            and field >= (d + 6 * s) / s - SLACK
            and field >= 12 * (s + 1) - SLACK
        )
        return {
            "log2_n": log2_n,
            "m": float(m),
            "s": float(s),
            "field_log2": float(field_log2),
            "delta": float(delta),
            "degree": float(d),
            "rate_lhs": float(rate_lhs),
            "rate_rhs": float(rate_rhs),
            "rate_ok": bool(rate_ok),
            "query_exponent": float(exponent),
            "query_ok": bool(query_ok),
            "field_condition_ok": bool(field_condition_ok),
        }


def tensor_schedule(log2_n: int) -> dict:
    """The sub-constant-distance tensor schedule at block length 2^log2_n.

    Base code of block length n^(1/m) and rate (1 - 1/L)^(1/m); the m-fold
    tensor power then has distance (1 - r)^m, lower bounded through the
    power approximation by (1 / (4 m L))^m.  Both the approximation
    instance and the resulting chain are checked numerically.
    """
    with mp.workprec(PRECISION_BITS):
        L = mp.mpf(log2_n)
        LL = mp.log(L, 2)
        if LL <= 0:
            raise ValueError("schedule needs log2(n) >= 2")
        m = mp.sqrt(L / LL)
        base_length_log2 = L / m  # equals sqrt(L * LL)
        r = (1 - 1 / L) ** (1 / m)

        fact = fact_power_approximation(1 / L, 1 / m)
        # (1-1/L)^(1/m) <= 1 - 1/(4 m L)  ==>  1 - r >= 1/(4 m L)
        bound = 1 / (4 * m * L)
        chain_ok = bool(fact["ok"]) and (1 - r) >= bound - SLACK

        distance = (1 - r) ** m
        chain_value = bound**m
        distance_ok = distance >= chain_value - SLACK

        # query expression: (base length)^2 * (1/delta)^(2m), up to poly(m)
        query_log2 = 2 * base_length_log2 + 2 * m * mp.log(1 / bound, 2)
        exponent = query_log2 / mp.sqrt(L * LL)
        return {
            "log2_n": log2_n,
            "m": float(m),
            "base_length_log2": float(base_length_log2),
            "base_rate": float(r),
            "fact_lhs": fact["lhs"],
            "fact_rhs": fact["rhs"],
            "fact_ok": fact["ok"],
            "chain_bound": float(bound),
            "distance": float(distance),
            "chain_value": float(chain_value),
            "chain_ok": bool(chain_ok and distance_ok),
            "query_exponent": float(exponent),
        }


def default_grid(n_max_log2: int) -> list[int]:
    return [j for j in range(4, n_max_log2 + 1, 4)] + (
        [n_max_log2] if n_max_log2 % 4 else []
    )


def check_schedules(n_max_log2: int, grid: list[int] | None = None) -> list[dict]:
    """One merged row per grid point; the 'ok' field ands all checks."""
    if n_max_log2 > 64:
        raise ValueError("grid capped at n = 2^64")
    if grid is None:
        grid = default_grid(n_max_log2)
    rows = []
    for j in grid:
        mrow = multiplicity_schedule(j)
        trow = tensor_schedule(j)
        row = {f"mult_{k}": v for k, v in mrow.items() if k != "log2_n"}
        row.update({f"tensor_{k}": v for k, v in trow.items() if k != "log2_n"})
        row["log2_n"] = j
        row["ok"] = bool(
            mrow["rate_ok"] and mrow["query_ok"] and trow["fact_ok"] and trow["chain_ok"]
        )
        rows.append(row)
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = ["log2_n", "ok"] + sorted(k for k in rows[0] if k not in ("log2_n", "ok"))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([row[c] for c in cols])
    return buf.getvalue()

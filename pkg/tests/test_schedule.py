from fractions import Fraction

import mpmath as mp

from localcodes.schedule import (
    check_schedules,
    fact_power_approximation,
    multiplicity_schedule,
    rows_to_csv,
    tensor_schedule,
)


class TestPowerApproximation:
    def test_half_one(self):
        out = fact_power_approximation(0.5, 1)
        assert out["lhs"] == 0.5 and out["rhs"] == 0.875 and out["ok"]

    def test_grid(self):
        for x in (0.01, 0.1, 0.5, 0.9):
            for y in (0.1, 0.5, 1.0):
                if x * y <= 1:
                    assert fact_power_approximation(x, y)["ok"]

    def test_out_of_domain(self):
        assert not fact_power_approximation(0.9, 2.0)["ok"]  # x*y > 1


class TestMultiplicitySchedule:
    def test_n_2_16_values(self):
        row = multiplicity_schedule(16)
        assert abs(row["m"] - 2.0) < 1e-12
        assert abs(row["s"] - 128.0) < 1e-9
        assert abs(row["delta"] - 1 / 64) < 1e-15
        assert row["rate_ok"]
        # degree: s * |F| * (1 - delta) with |F| = 2^8
        assert abs(row["degree"] - 128 * 256 * (63 / 64)) < 1e-6

    def test_rate_bound_holds_on_grid(self):
        for j in (4, 8, 16, 32, 40):
            assert multiplicity_schedule(j)["rate_ok"]

    def test_query_exponent_capped(self):
        for j in (4, 8, 16, 32, 40, 64):
            row = multiplicity_schedule(j)
            assert row["query_ok"]
            assert row["query_exponent"] <= 3.0 + 1e-9


class TestTensorSchedule:
    def test_chain_reproduces_closed_form_at_2_16(self):
        row = tensor_schedule(16)
        # m = 2 exactly, so the chain value is (1/(4*2*16))^2 = 1/16384
        want = Fraction(1, 128) ** 2
        assert abs(row["chain_value"] - float(want)) <= 1e-15
        assert row["chain_ok"] and row["fact_ok"]
        assert abs(row["base_length_log2"] - 8.0) < 1e-12

    def test_chain_holds_on_grid(self):
        for j in (4, 8, 16, 32, 40):
            row = tensor_schedule(j)
            assert row["fact_ok"] and row["chain_ok"]
            assert row["distance"] >= row["chain_value"] - 1e-12


class TestDriver:
    def test_full_grid_passes(self):
        rows = check_schedules(40)
        assert rows and all(r["ok"] for r in rows)
        assert rows[-1]["log2_n"] == 40

    def test_csv_shape(self):
        rows = check_schedules(16)
        text = rows_to_csv(rows)
        lines = text.strip().split("\n")
        assert lines[0].startswith("log2_n,ok,")
        assert len(lines) == len(rows) + 1

    def test_field_condition_eventually_holds(self):
        rows = check_schedules(40)
        assert rows[-1]["mult_field_condition_ok"]

"""Analysis layer: convergence tables, rate estimation, the cancellation
audit, catalog reproduction, and the identity suite."""

from fractions import Fraction

import pytest

from radpi import (
    DomainError,
    FixedReal,
    PrecisionContext,
    Seed,
    cancellation_audit,
    convergence_table,
    correct_decimal_digits,
    empirical_rate,
    pi_method2,
    pi_oracle,
    reproduce_catalog,
    verify_identities,
)


class TestCorrectDigits:
    @pytest.mark.parametrize(
        "fr,expected",
        [
            (Fraction(1, 1000), 3),
            (Fraction(1, 10**12), 12),
            (Fraction(3, 10**13), 12),  # 3e-13 -> floor(12.52) = 12
            (Fraction(7, 10), 0),
            (Fraction(1), 0),
            (Fraction(314, 100), -1),
            (Fraction(1000), -3),
        ],
    )
    def test_values(self, fr, expected):
        assert correct_decimal_digits(FixedReal.from_fraction(fr, 192)) == expected

    def test_boundary_powers_of_ten(self):
        # 10^-d is dyadic-truncated just below the boundary, so the floor
        # stays at d for the representable neighbor
        for d in (1, 5, 17):
            x = FixedReal.from_fraction(Fraction(1, 10**d), 256)
            assert correct_decimal_digits(x) == d

    def test_zero_is_none(self):
        assert correct_decimal_digits(FixedReal.zero(64)) is None


class TestEmpiricalRate:
    def test_geometric(self):
        errs = [FixedReal.from_fraction(Fraction(1, 4**i), 96) for i in range(3)]
        ratios = empirical_rate(errs)
        assert [r.to_decimal(4) for r in ratios] == ["4.0000", "4.0000"]

    def test_two_entries(self):
        errs = [FixedReal.from_fraction(Fraction(1, 100), 96),
                FixedReal.from_fraction(Fraction(1, 10000), 96)]
        assert empirical_rate(errs)[0].to_decimal(2) == "100.00"

    def test_single_entry_empty(self):
        assert empirical_rate([FixedReal.one(64)]) == []

    def test_zero_error_rejected(self):
        with pytest.raises(DomainError):
            empirical_rate([FixedReal.one(64), FixedReal.zero(64)])


class TestConvergenceTable:
    def test_method1_first_rows(self, ctx128):
        report = convergence_table("method1", {"seed": Seed(2, 2, 1)}, [1, 2, 3], ctx128)
        approx = [r.approximant[:9] for r in report.rows]
        assert approx == ["3.0614674", "3.1214451", "3.1365484"]
        assert report.rows[0].error_ratio is None
        assert report.rows[1].error_ratio is not None

    def test_method1_ratios_go_quartic(self, ctx128):
        report = convergence_table("method1", {"seed": Seed(2, 2, 1)}, list(range(5, 12)), ctx128)
        for row in report.rows[1:]:
            assert 3.5 < float(row.error_ratio) < 4.5

    def test_method2_rows_shrink_per_decade(self, ctx128):
        report = convergence_table("method2_corrected", {"d": 1}, [100, 1000], ctx128)
        assert 90 < float(report.rows[1].error_ratio) < 110

    def test_unity_first_rows(self, ctx128):
        report = convergence_table("unity", {"seed": Seed(1, 0, 1)}, [1, 2], ctx128)
        assert report.rows[0].approximant[:9] == "0.9003163"
        assert report.rows[1].approximant[:9] == "0.9744953"

    def test_error_recompute_matches_stored_exactly(self, ctx128):
        report = convergence_table("method1", {"seed": Seed(2, 3, 1)}, [2, 4], ctx128)
        scale = report.meta["measure_bits"]
        digits = report.meta["oracle_digits"]
        pi_ref = pi_oracle(PrecisionContext(scale))
        for row in report.rows:
            recomputed = abs(FixedReal.from_decimal(row.approximant, scale) - pi_ref)
            assert recomputed.rescale(128).to_decimal(digits) == row.abs_error

    def test_empty_sweep(self, ctx128):
        report = convergence_table("viete", {}, [], ctx128)
        assert report.rows == []

    def test_unknown_method(self, ctx128):
        with pytest.raises(DomainError):
            convergence_table("bisection", {}, [1], ctx128)


@pytest.fixture(scope="module")
def audit_rows():
    return cancellation_audit(Seed(2, 2, 1), 40, 53, PrecisionContext(256))


class TestCancellationAudit:
    def test_stable_floor(self, audit_rows):
        scale = audit_rows[-1].stable_error.scale_bits
        bound = FixedReal.from_fraction(Fraction(1, 10**13), scale)
        assert audit_rows[-1].stable_error < bound

    def test_naive_blowup(self, audit_rows):
        scale = audit_rows[-1].naive_error.scale_bits
        bound = FixedReal.from_fraction(Fraction(1, 10**7), scale)
        assert audit_rows[-1].naive_error > bound

    def test_u_shape(self, audit_rows):
        errs = [r.naive_error for r in audit_rows]
        k_min = min(range(len(errs)), key=lambda i: errs[i].mantissa)
        assert k_min < len(errs) - 5  # bottoms out well before the end
        # a non-decreasing tail exists and the growth from the bottom is large
        tail_start = len(errs) - 1
        while tail_start > 0 and errs[tail_start - 1].mantissa <= errs[tail_start].mantissa:
            tail_start -= 1
        assert tail_start <= 30
        assert errs[-1].mantissa > 100 * errs[k_min].mantissa

    def test_min_naive_above_final_stable(self, audit_rows):
        min_naive = min(r.naive_error.mantissa for r in audit_rows)
        assert min_naive > audit_rows[-1].stable_error.mantissa

    def test_digits_lost_positive_late(self, audit_rows):
        assert audit_rows[-1].digits_lost > 8

    def test_preconditions(self):
        with pytest.raises(DomainError):
            cancellation_audit(Seed(2, 2, 1), 5, 16, PrecisionContext(256))
        with pytest.raises(DomainError):
            cancellation_audit(Seed(2, 2, 1), 5, 53, PrecisionContext(128))

    def test_accepts_self_ratio_seed(self):
        rows = cancellation_audit(Seed(5, 16, 1), 8, 53, PrecisionContext(256))
        assert len(rows) == 8
        assert rows[0].naive_error.mantissa > 0


class TestReproduceCatalog:
    def test_all_four_pass(self, ctx128):
        report = reproduce_catalog(ctx128)
        assert len(report.results) == 4
        assert all(r.prefactor_exact and r.radical_shape_ok and r.converged for r in report.results)

    def test_depth_errors_small(self, ctx128):
        report = reproduce_catalog(ctx128)
        for r in report.results:
            scale = r.error_at_depth.scale_bits
            assert r.error_at_depth < FixedReal.from_fraction(Fraction(1, 10**12), scale)

    def test_index_shift_documented(self, ctx128):
        assert "k + 1" in reproduce_catalog(ctx128).meta["index_shift"]


class TestVerifyIdentities:
    def test_all_pass(self, ctx128):
        report = verify_identities(ctx128)
        assert report.all_passed, [r.name for r in report.results if not r.passed]
        names = " ".join(r.name for r in report.results)
        assert "scale identity" in names
        assert "pythagorean" in names
        assert "normalization" in names


def test_combined_beats_both_individually(ctx128):
    # the combination converges faster than either knob alone
    scale = 512
    pi_ref = pi_oracle(PrecisionContext(scale))

    def err(value):
        return abs(value.rescale(scale) - pi_ref)

    from radpi import pi_combined, pi_method1

    e_combined = err(pi_combined(100, 1, 10, ctx128).value)
    e_method1 = err(pi_method1(Seed(2, 2, 1), 10, ctx128).value)
    e_method2 = err(pi_method2(100, 1, ctx128).value)
    assert e_combined < e_method1
    assert e_combined < e_method2

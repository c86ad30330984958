"""Convergence tabulation, empirical rate estimation, the naive-vs-stable
cancellation audit, reproduction of the four classical catalog formulas, and
the identity verification suite.

Errors are always measured against the series references at a precision at
least four times the working precision of the audited computation, so the
reference never pollutes reported digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import (
    FixedReal,
    PrecisionContext,
    decimal_digits_for_bits,
    pi_fixed,
)
from .drivers import (
    Approximant,
    arccos_by_recursion,
    exact_ratio_lookup,
    pi_combined,
    pi_method1,
    pi_method2,
    unity_formula,
    viete_product,
)
from .errors import CatalogFailure, DomainError
from .recursion import (
    Seed,
    f_power_form,
    nested_literal,
    run_at_scale,
    run_recursion,
)

_RATIO_DIGITS = 6


@dataclass(frozen=True)
class ReportRow:
    index: int
    approximant: str
    abs_error: str
    correct_digits: int | None
    error_ratio: str | None


@dataclass(frozen=True)
class ConvergenceReport:
    """Tabulated approximants with errors against the reference target.

    Rows are exactly recomputable: parsing a row's approximant string at
    meta["measure_bits"] and differencing against the reference at that scale
    reproduces the stored abs_error string byte for byte.
    """

    rows: list[ReportRow]
    meta: dict[str, object]


@dataclass(frozen=True)
class AuditRow:
    k: int
    naive_error: FixedReal
    stable_error: FixedReal
    digits_lost: int


def correct_decimal_digits(err: FixedReal) -> int | None:
    """floor(-log10 |err|), exactly, from the integer mantissa; None for zero."""
    m = abs(err.mantissa)
    if m == 0:
        return None
    cap = 1 << err.scale_bits
    if m <= cap:
        # largest d >= 0 with m * 10**d <= cap; bit-length estimate, then settle
        d = max(0, ((cap.bit_length() - m.bit_length() - 1) * 30103) // 100000 - 1)
        while m * 10 ** (d + 1) <= cap:
            d += 1
        return d
    t = 1
    while m > cap * 10**t:
        t += 1
    return -t


def _measure_scale(working_bits: int) -> int:
    return 4 * working_bits


def _target_value(target: str, scale: int) -> FixedReal:
    if target == "pi":
        return pi_fixed(scale)
    if target == "one":
        return FixedReal.one(scale)
    raise DomainError(f"no reference value for target {target!r}")


def abs_error(approx: Approximant, scale: int) -> FixedReal:
    """|value - target| at the measurement scale (the rescale up is exact)."""
    return abs(approx.value.rescale(scale) - _target_value(approx.target, scale))


def empirical_rate(errors: Sequence[FixedReal]) -> list[FixedReal]:
    """Consecutive ratios e_i / e_(i+1); all entries must be positive."""
    if len(errors) < 2:
        return []
    for e in errors:
        if e.mantissa <= 0:
            raise DomainError(
                "empirical rate needs positive errors (a zero error means the "
                "reference precision was exceeded; raise scale_bits)"
            )
    return [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]


def _build_approximant(method: str, params: dict, index: int, ctx: PrecisionContext) -> Approximant:
    if method == "method1":
        return pi_method1(params["seed"], index, ctx, params.get("ratio_mode", "auto"),
                          params.get("variant", "stable"))
    if method == "method2_corrected":
        return pi_method2(index, params.get("d", 1), ctx, "corrected")
    if method == "method2_as_printed":
        return pi_method2(index, params.get("d", 1), ctx, "as_printed")
    if method == "combined":
        return pi_combined(params["m"], params.get("d", 1), index, ctx)
    if method == "unity":
        return unity_formula(params["seed"], index, ctx)
    if method == "viete":
        return viete_product(index, ctx)
    raise DomainError(f"unknown table method {method!r}")


def convergence_table(
    method: str, params: dict, sweep: Sequence[int], ctx: PrecisionContext
) -> ConvergenceReport:
    """One row per sweep index (recursion depth k, or starting term m).

    error_ratio is previous abs_error over current abs_error; the first row's
    ratio is empty.
    """
    if not sweep:
        return ConvergenceReport(rows=[], meta=_table_meta(method, params, ctx, 0, 0))
    approximants = [_build_approximant(method, params, index, ctx) for index in sweep]
    worst_guard = max(int(a.params["guard_bits"]) for a in approximants)
    scale = _measure_scale(ctx.scale_bits + worst_guard)
    target_ref = _target_value(approximants[0].target, scale)
    digits = decimal_digits_for_bits(ctx.scale_bits)
    rows: list[ReportRow] = []
    prev_err: FixedReal | None = None
    for index, approx in zip(sweep, approximants):
        shown = approx.value.to_decimal(digits)
        err = abs(FixedReal.from_decimal(shown, scale) - target_ref)
        ratio = None
        if prev_err is not None and err.mantissa > 0 and prev_err.mantissa > 0:
            ratio = (prev_err / err).to_decimal(_RATIO_DIGITS)
        rows.append(
            ReportRow(
                index=index,
                approximant=shown,
                abs_error=err.rescale(ctx.scale_bits).to_decimal(digits),
                correct_digits=correct_decimal_digits(err),
                error_ratio=ratio,
            )
        )
        prev_err = err
    return ConvergenceReport(
        rows=rows, meta=_table_meta(method, params, ctx, worst_guard, scale)
    )


def _table_meta(
    method: str, params: dict, ctx: PrecisionContext, guard: int, measure_bits: int
) -> dict:
    described = {
        key: (value.describe() if isinstance(value, Seed) else str(value))
        for key, value in params.items()
    }
    return {
        "method": method,
        "params": described,
        "bits": ctx.scale_bits,
        "guard_bits": guard if guard else (ctx.guard_bits or 64),
        "measure_bits": measure_bits,
        "oracle_digits": decimal_digits_for_bits(ctx.scale_bits),
    }


def cancellation_audit(
    seed: Seed, k_max: int, audited_bits: int, ctx_reference: PrecisionContext
) -> list[AuditRow]:
    """Run both sine variants at a raw fixed scale and measure both against a
    far more precise reference.

    The naive error shows the characteristic U shape (truncation falls, then
    amplified cancellation noise climbs until the sine collapses entirely);
    the stable error falls to the rounding floor of about k units and stays.
    """
    if audited_bits < 24:
        raise DomainError("audited_bits must be >= 24")
    if ctx_reference.scale_bits < 4 * audited_bits:
        raise DomainError("reference precision must be >= 4x audited_bits")
    ratio = exact_ratio_lookup(seed)
    if ratio is None:
        work = ctx_reference.scale_bits + 64
        theta0 = arccos_by_recursion(seed.value(work), PrecisionContext(work))
        ratio_fixed = ((pi_fixed(work) * 2) / theta0).rescale(audited_bits)
    else:
        ratio_fixed = None
    scale = ctx_reference.scale_bits
    pi_ref = pi_fixed(scale)
    naive_states = run_at_scale(seed, k_max, audited_bits, "naive")
    stable_states = run_at_scale(seed, k_max, audited_bits, "stable")
    rows: list[AuditRow] = []
    for k in range(1, k_max + 1):
        errs = []
        for states in (naive_states, stable_states):
            s_k = states[k].scaled_sine
            value = s_k.mul_fraction(ratio / 2) if ratio is not None else (s_k * ratio_fixed) / 2
            errs.append(abs(value.rescale(scale) - pi_ref))
        naive_err, stable_err = errs
        lost = (correct_decimal_digits(stable_err) or 0) - (correct_decimal_digits(naive_err) or 0)
        rows.append(AuditRow(k=k, naive_error=naive_err, stable_error=stable_err, digits_lost=lost))
    return rows


# -- classical catalog --------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    """One classical formula: coefficient times an all-twos nested radical."""

    name: str  # rendered coefficient, e.g. "2^n"
    seed: Seed
    coefficient: "CoefficientRule"


@dataclass(frozen=True)
class CoefficientRule:
    """Printed coefficient c * 2**(n + shift) at n nested square roots."""

    factor: Fraction
    shift: int

    def at(self, n: int) -> Fraction:
        return self.factor * Fraction(2) ** (n + self.shift)

    def render(self) -> str:
        base = f"2^(n{self.shift:+d})" if self.shift else "2^n"
        if self.factor == 1:
            return base
        return f"({self.factor})*{base}"


CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry("2^n * sqrt(2 - sqrt(2 + ... + sqrt(2 + sqrt(2))))",
                 Seed(2, 2, 1), CoefficientRule(Fraction(1), 0)),
    CatalogEntry("3*2^(n-1) * sqrt(2 - sqrt(2 + ... + sqrt(2 + sqrt(3))))",
                 Seed(2, 3, 1), CoefficientRule(Fraction(3), -1)),
    CatalogEntry("(3/5)*2^(n-1) * sqrt(2 - sqrt(2 + ... + sqrt(2 - sqrt(3))))",
                 Seed(2, 3, -1), CoefficientRule(Fraction(3, 5), -1)),
    CatalogEntry("(4/3)*2^(n-2) * sqrt(2 - sqrt(2 + ... + sqrt(2 - sqrt(2))))",
                 Seed(2, 2, -1), CoefficientRule(Fraction(4, 3), -2)),
)


@dataclass(frozen=True)
class CatalogResult:
    name: str
    seed: str
    prefactor_exact: bool
    radical_shape_ok: bool
    error_at_depth: FixedReal
    converged: bool


@dataclass(frozen=True)
class CatalogReport:
    results: list[CatalogResult]
    meta: dict[str, object]


def _printed_all_twos_radical(s: Fraction, inner_sign: int, n: int, scale: int) -> FixedReal:
    """The classical radical with n square roots, hard-coded for m = 2:
    sqrt(2 - sqrt(2 + ... + sqrt(2 +- sqrt(s)))). Independent of the engine's
    chain construction, so it checks the radical shape."""
    t = FixedReal.from_fraction(s, scale).sqrt()
    if inner_sign < 0:
        t = -t
    two = FixedReal.from_int(2, scale)
    for _ in range(n - 2):
        t = (two + t).sqrt()
    return (two - t).sqrt()


def reproduce_catalog(
    ctx: PrecisionContext,
    depth: int = 25,
    convergence_tolerance: Fraction = Fraction(1, 10**12),
) -> CatalogReport:
    """Verify the four classical formulas against the general machinery.

    For each entry: (a) the engine prefactor R * 2**(k-1) / f(k+2) reduces to
    the printed coefficient at n = k + 1 as an exact rational for every k up
    to the depth, (b) the literal all-twos radical matches the engine value,
    and (c) the depth-25 approximant is within the tolerance of pi. Any
    mismatch raises CatalogFailure naming the formula.
    """
    work = ctx.scale_bits + ctx.guard_for_depth(depth)
    scale = _measure_scale(work)
    pi_ref = pi_fixed(scale)
    tol_fixed = FixedReal.from_fraction(convergence_tolerance, scale)
    results = []
    for entry in CATALOG:
        ratio = exact_ratio_lookup(entry.seed)
        if ratio is None:
            raise CatalogFailure(f"{entry.name}: seed unexpectedly uncataloged")
        for k in range(1, depth + 1):
            f_exact = f_power_form(k + 2, entry.seed.m).exact_value()
            if f_exact is None:
                raise CatalogFailure(f"{entry.name}: scale factor not exact at k={k}")
            prefactor = ratio * Fraction(2) ** (k - 1) / f_exact
            if prefactor != entry.coefficient.at(k + 1):
                raise CatalogFailure(
                    f"{entry.name}: prefactor {prefactor} != printed "
                    f"{entry.coefficient.at(k + 1)} at n={k + 1}"
                )
        shape_k = min(depth, 8)
        printed = _printed_all_twos_radical(
            entry.seed.s, entry.seed.sign, shape_k + 1, work
        ).mul_fraction(entry.coefficient.at(shape_k + 1))
        via_literal = nested_literal(entry.seed, shape_k, ctx).rescale(work).mul_fraction(
            ratio * Fraction(2) ** (shape_k - 1)
        )
        shape_gap = abs(printed - via_literal)
        # both routes agree to ~2^(-B + 2k) absolute; structural mismatches are O(1)
        if shape_gap.mantissa > (1 << (work - ctx.scale_bits + 2 * shape_k + 16)):
            raise CatalogFailure(f"{entry.name}: literal radical shape mismatch")
        err = abs_error(pi_method1(entry.seed, depth, ctx, "exact"), scale)
        if not err < tol_fixed:
            raise CatalogFailure(
                f"{entry.name}: depth-{depth} approximant off by {err.to_decimal(18)}"
            )
        results.append(
            CatalogResult(
                name=entry.name,
                seed=entry.seed.describe(),
                prefactor_exact=True,
                radical_shape_ok=True,
                error_at_depth=err,
                converged=True,
            )
        )
    meta = {
        "depth": depth,
        "bits": ctx.scale_bits,
        "index_shift": "printed n = engine k + 1",
        "tolerance": str(convergence_tolerance),
    }
    return CatalogReport(results=results, meta=meta)


# -- identity suite -----------------------------------------------------------


@dataclass(frozen=True)
class IdentityResult:
    name: str
    passed: bool
    worst_residual: str
    detail: str


@dataclass(frozen=True)
class IdentityReport:
    results: list[IdentityResult]
    meta: dict[str, object] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)


_IDENTITY_SEEDS = (Seed(2, 2, 1), Seed(2, 3, 1), Seed(2, 3, -1), Seed(2, 2, -1))


def verify_identities(ctx: PrecisionContext) -> IdentityReport:
    """Run the recursion module's invariant suite and report per-identity
    pass/fail with worst-case residuals."""
    results = []

    ok = True
    for m in (2, 3, 5, 10):
        for k in range(2, 65):
            if f_power_form(k + 1, m).squared() != f_power_form(k, m).times_two():
                ok = False
    results.append(
        IdentityResult(
            "scale identity f(k+1)^2 = 2 f(k) (exact exponents, k in [2,64], m in {2,3,5,10})",
            ok, "0", "rational exponent arithmetic",
        )
    )

    depth = 20
    work = ctx.scale_bits + ctx.guard_for_depth(depth)
    pyth_worst = 0
    pyth_ok = True
    norm_worst = 0
    norm_ok = True
    for seed in _IDENTITY_SEEDS:
        states = run_recursion(seed, depth, ctx)
        one = FixedReal.one(work)
        for st in states:
            bound = 1 << (st.k + 6)
            resid = abs((st.x * st.x + st.c * st.c - one).mantissa)
            pyth_worst = max(pyth_worst, resid)
            if resid >= bound:
                pyth_ok = False
            resid = abs((st.x * st.f - st.g).mantissa)
            norm_worst = max(norm_worst, resid)
            if resid >= bound:
                norm_ok = False
    results.append(
        IdentityResult(
            "pythagorean x^2 + c^2 = 1 within 2^(-B+k+6)",
            pyth_ok, f"{pyth_worst} units at {work} bits", f"4 seeds, k <= {depth}",
        )
    )
    results.append(
        IdentityResult(
            "normalization x * f = g within 2^(-B+k+6)",
            norm_ok, f"{norm_worst} units at {work} bits", f"4 seeds, k <= {depth}",
        )
    )

    lit_ok = True
    lit_worst_bits = None
    for seed in _IDENTITY_SEEDS:
        states = run_recursion(seed, depth, ctx)
        for k in (1, 2, 5, 10, 15, 20):
            lit = nested_literal(seed, k, ctx)
            rec = states[k].c.rescale(ctx.scale_bits)
            gap = abs((lit - rec).mantissa)
            bound = 1 << (2 * k + 8)
            if gap >= bound:
                lit_ok = False
            gap_bits = gap.bit_length()
            if lit_worst_bits is None or gap_bits > lit_worst_bits:
                lit_worst_bits = gap_bits
    results.append(
        IdentityResult(
            "literal radical = stable recursion within 2^(-B+2k+8)",
            lit_ok, f"worst gap < 2^{lit_worst_bits} units at {ctx.scale_bits} bits",
            f"4 seeds, k <= {depth}",
        )
    )

    viete_ok = True
    viete_worst = 0
    seed0 = Seed(1, 0, 1)
    for k in (1, 5, 10, 20, 30):
        v = viete_product(k, ctx).value
        p = pi_method1(seed0, k, ctx, "exact").value
        gap = abs((v - p).mantissa)
        viete_worst = max(viete_worst, gap)
        if gap >= 1 << 8:
            viete_ok = False
    results.append(
        IdentityResult(
            "product form = matched recursion form within 2^(-B+8)",
            viete_ok, f"{viete_worst} units at {ctx.scale_bits} bits", "k in {1,5,10,20,30}",
        )
    )

    mono_ok = True
    for seed in _IDENTITY_SEEDS:
        states = run_recursion(seed, 30, ctx)
        doubled = [st.scaled_sine for st in states[1:]]
        mono_work = doubled[0].scale_bits
        theta = arccos_by_recursion(seed.value(mono_work), PrecisionContext(mono_work))
        for a, b in zip(doubled, doubled[1:]):
            if not a < b:
                mono_ok = False
        if not doubled[-1] < theta:
            mono_ok = False
    results.append(
        IdentityResult(
            "doubled sines strictly increase and stay below theta0",
            mono_ok, "-", "4 seeds, k <= 30",
        )
    )

    f_ok = True
    two = FixedReal.from_int(2, work)
    for m in (2, 3, 5, 10):
        for k in range(6, 41):
            val = f_power_form(k, m).value_fixed(work)
            gap = abs(val - two)
            if m == 2:
                if gap.mantissa != 0:
                    f_ok = False
                continue
            # |f(k) - 2| = 2(e^u - 1) with u = ln(m/2)/2^(k-2), bounded by u*f(k)
            u = abs(math.log(m / 2)) / 2 ** (k - 2)
            bound = u * float(val) + 2.0 ** (-work + 8)
            if gap.mantissa > bound * (1 << work):
                f_ok = False
    results.append(
        IdentityResult(
            "scale factor tends to 2: |f(k) - 2| <= |ln(m/2)|/2^(k-2) * f(k), exact 2 at m=2",
            f_ok, "-", "m in {2,3,5,10}, k in [6,40]",
        )
    )

    return IdentityReport(
        results=results,
        meta={"bits": ctx.scale_bits, "working_bits": work},
    )

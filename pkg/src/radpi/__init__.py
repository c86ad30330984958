"""High-precision evaluation of pi and 1 through nested-radical half-angle
recursions, with convergence diagnostics and exact identity checks."""

from .arith import (
    FixedReal,
    PrecisionContext,
    arccos_oracle,
    decimal_digits_for_bits,
    fixed_sqrt,
    isqrt,
    pi_oracle,
)
from .analysis import (
    AuditRow,
    CatalogReport,
    ConvergenceReport,
    IdentityReport,
    ReportRow,
    cancellation_audit,
    convergence_table,
    correct_decimal_digits,
    empirical_rate,
    reproduce_catalog,
    verify_identities,
)
from .drivers import (
    AngleRatio,
    Approximant,
    angle_ratio,
    arccos_by_recursion,
    pi_combined,
    pi_method1,
    pi_method2,
    taylor_seed,
    taylor_seed_exact,
    unity_formula,
    viete_product,
)
from .errors import (
    CatalogFailure,
    CatalogMissError,
    ConvergenceError,
    DomainError,
    PrecisionError,
    RadpiError,
    UsageError,
)
from .recursion import (
    PowerForm,
    RecursionState,
    Seed,
    f_power_form,
    half_angle_step,
    nested_literal,
    radicand_step,
    run_recursion,
    sine_step_naive,
    sine_step_stable,
)

__version__ = "0.1.0"

__all__ = [
    "AngleRatio",
    "Approximant",
    "AuditRow",
    "CatalogFailure",
    "CatalogMissError",
    "CatalogReport",
    "ConvergenceError",
    "ConvergenceReport",
    "DomainError",
    "FixedReal",
    "IdentityReport",
    "PowerForm",
    "PrecisionContext",
    "PrecisionError",
    "RadpiError",
    "RecursionState",
    "ReportRow",
    "Seed",
    "UsageError",
    "angle_ratio",
    "arccos_by_recursion",
    "arccos_oracle",
    "cancellation_audit",
    "convergence_table",
    "correct_decimal_digits",
    "decimal_digits_for_bits",
    "empirical_rate",
    "f_power_form",
    "fixed_sqrt",
    "half_angle_step",
    "isqrt",
    "nested_literal",
    "pi_combined",
    "pi_method1",
    "pi_method2",
    "pi_oracle",
    "radicand_step",
    "reproduce_catalog",
    "run_recursion",
    "sine_step_naive",
    "sine_step_stable",
    "taylor_seed",
    "taylor_seed_exact",
    "unity_formula",
    "verify_identities",
    "viete_product",
]

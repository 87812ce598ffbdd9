"""Change-point detection in exponential sequences."""

from ._core import (
    ChangeRecord,
    CriticalValueTable,
    InputError,
    MissingTableError,
    ScanResult,
    StatKind,
    StatisticSpec,
    __version__,
    binary_segment,
    binomial_accuracy_test,
    critical_index,
    critical_value_from_sorted,
    default_specs,
    estimate_critical_values,
    evaluate,
    kl_exponential,
    kolmogorov_survival,
    lrt_asymptotic_critical,
    norm_a,
    norm_b,
    normalize_lrt,
    s_asymptotic_critical,
    simulate_null_distribution,
    trimmed_range,
)

__all__ = [
    "ChangeRecord",
    "CriticalValueTable",
    "InputError",
    "MissingTableError",
    "ScanResult",
    "StatKind",
    "StatisticSpec",
    "__version__",
    "binary_segment",
    "binomial_accuracy_test",
    "critical_index",
    "critical_value_from_sorted",
    "default_specs",
    "estimate_critical_values",
    "evaluate",
    "kl_exponential",
    "kolmogorov_survival",
    "lrt_asymptotic_critical",
    "norm_a",
    "norm_b",
    "normalize_lrt",
    "s_asymptotic_critical",
    "simulate_null_distribution",
    "trimmed_range",
]

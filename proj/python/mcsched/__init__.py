"""Multi-rate fluid scheduling of dual-criticality task systems."""

from ._core import (
    GenerationError,
    InputError,
    TaskSet,
    dual_rate_assign,
    dual_rate_test,
    generate,
    multi_rate_test,
    run_experiment,
    simulate,
    soma,
    weighted_acceptance_ratio,
)

__all__ = [
    "GenerationError",
    "InputError",
    "TaskSet",
    "dual_rate_assign",
    "dual_rate_test",
    "generate",
    "multi_rate_test",
    "run_experiment",
    "simulate",
    "soma",
    "weighted_acceptance_ratio",
]

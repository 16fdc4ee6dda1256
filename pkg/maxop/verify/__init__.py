"""Property checks, the continuity experiment and corpus suites."""

from .checks import (
    check_abs_convergence,
    check_convex_limit,
    check_finite_intervals,
    check_lemma6,
    check_pointwise_derivative,
    check_prop5,
    check_subharmonicity,
    check_tail_bound,
    check_tail_mass,
    check_transfer_identity,
    check_uniform_bound,
    check_variation_diminishing,
    check_variation_norm_convergence,
    detached_members,
    pick_tail_radius,
)
from .continuity import ContinuityResult, ContinuityRow, continuity_experiment
from .reports import PropertyReport, make_report
from .sequences import ContinuitySequence
from .suites import SuiteResult, SuiteRunner, all_passed

__all__ = [
    "PropertyReport",
    "make_report",
    "ContinuitySequence",
    "ContinuityResult",
    "ContinuityRow",
    "continuity_experiment",
    "SuiteResult",
    "SuiteRunner",
    "all_passed",
    "pick_tail_radius",
    "detached_members",
    "check_subharmonicity",
    "check_uniform_bound",
    "check_tail_bound",
    "check_tail_mass",
    "check_lemma6",
    "check_finite_intervals",
    "check_prop5",
    "check_variation_norm_convergence",
    "check_convex_limit",
    "check_variation_diminishing",
    "check_abs_convergence",
    "check_pointwise_derivative",
    "check_transfer_identity",
]

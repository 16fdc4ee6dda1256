# maxop package
"""Numerical lab for one-dimensional maximal functions of convolution type."""

from .funcmodel import PiecewiseLinearFn, StepFunction, derivative, norm_w11, simple_approx
from .kernels import KernelFamily, KernelSpec, make_kernel
from .scalespace import MaximalProfile, extension, maximal_at, maximal_profile
from .detachment import IntervalSet, decompose, detachment_set
from .variation import Partition, extremal_partition, total_variation, transfer_partition, var_over_partition
from .corpus import generate_corpus
from .config import RunConfig, build_config
from .errors import MaxopError

__version__ = "0.1.0"

__all__ = [
    "PiecewiseLinearFn",
    "StepFunction",
    "derivative",
    "norm_w11",
    "simple_approx",
    "KernelFamily",
    "KernelSpec",
    "make_kernel",
    "MaximalProfile",
    "extension",
    "maximal_at",
    "maximal_profile",
    "IntervalSet",
    "decompose",
    "detachment_set",
    "Partition",
    "extremal_partition",
    "total_variation",
    "transfer_partition",
    "var_over_partition",
    "generate_corpus",
    "RunConfig",
    "build_config",
    "MaxopError",
]

"""Exponential-type smoothing kernels and numerical Jackson-inequality checks."""

from .weights import (
    AdmissibilityReport,
    CarlemanSequence,
    Weight,
    WeightError,
    ZeroSequence,
    alpha_from_group,
    carleman_report,
    check_admissible,
    eval_weight,
    make_weight,
)
from .kernels import Kernel, KernelError, KernelSpec, build_kernel, certify_bounds, eval_scaled, fejer_kernel, kernel_transform
from .spaces import GridFunction, GroupDescriptor, LineGrid, PeriodicGrid, differentiate, group_bound, norm, shift, trig_degree
from .smoothness import finite_difference, modulus, modulus_properties_check
from .approximation import best_approx, constant_estimate, jackson_check, jackson_derivative_check, smooth_vector

__version__ = "0.1.0"

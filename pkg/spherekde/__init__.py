"""Kernel density estimation on the unit sphere with SPCO, CV2 and oracle bandwidth selection."""

from spherekde.errors import (
    ConfigurationError,
    DomainError,
    InputFormatError,
    InsufficientDataError,
    MomentError,
    SphereKDEError,
)
from spherekde.estimator import (
    FittedEstimator,
    Sample,
    diff_sq_norm,
    evaluate,
    fit,
    inner_product,
    loo_evaluate,
    sq_norm,
)
from spherekde.geometry import UnitVector, normalize, product_quadrature_s2, rotation_onto, surface_area
from spherekde.kernel import KernelProfile, c0, c2, cross_inner, get_kernel, make_kernel, von_mises_kernel
from spherekde.selectors import build_grid, cv2_select, oracle_select, penalty, spco_select
from spherekde.targets import TargetDensity, VmfComponent, exact_inner, exact_sq_norm, f1vm, f2vm, get_target

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DomainError",
    "FittedEstimator",
    "InputFormatError",
    "InsufficientDataError",
    "KernelProfile",
    "MomentError",
    "Sample",
    "SphereKDEError",
    "TargetDensity",
    "UnitVector",
    "VmfComponent",
    "build_grid",
    "c0",
    "c2",
    "cross_inner",
    "cv2_select",
    "diff_sq_norm",
    "evaluate",
    "exact_inner",
    "exact_sq_norm",
    "f1vm",
    "f2vm",
    "fit",
    "get_kernel",
    "get_target",
    "inner_product",
    "loo_evaluate",
    "make_kernel",
    "normalize",
    "oracle_select",
    "penalty",
    "product_quadrature_s2",
    "rotation_onto",
    "sq_norm",
    "spco_select",
    "surface_area",
    "von_mises_kernel",
]

"""Anisoperimetric-ratio gradient flow of closed polygonal curves."""

from .anisotropy import (
    Anisotropy,
    Constant,
    Cosine,
    Affine,
    Mixed,
    wulff_boundary_point,
    wulff_area,
    energy_of_wulff,
    mixed_constant,
    minimizer_anisotropy,
)
from .polycurve import PolyCurve, build_frames, curvature, aniso_curvature, metrics, hausdorff
from .curves import CurveSpec, generate, sample_wulff, counterexample_curve
from .stepper import StepConfig, EvolveOptions, step, evolve

__version__ = "0.1.0"

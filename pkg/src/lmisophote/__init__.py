"""Isophote curves on spacelike surfaces in Lorentz-Minkowski 3-space."""

from .axis import (AxisReport, angle_consistency, analyze_curve, classify, gauss_image_check,
                   omega_function, psi_function, reconstruct_axis, verify_axis_constant)
from .errors import GeometryError, InfeasibleAngle, NotAnIsophote, SilhouetteUndefined
from .frames import FrenetData, SampledCurve, arclength_resample, frenet_apparatus
from .isophote import AxisSpec, extract_isophotes, illumination_field, make_axis
from .kernels import BACKEND
from .minkowski import (CausalCharacter, Vec3M, causal_character, cross, inner, norm,
                        same_timecone)
from .surface import (DarbouxData, ParamSurface, builtin_surface, darboux_apparatus,
                      parse_surface_expr, relation_check, surface_curve, surface_from_spec,
                      surface_normal, verify_spacelike)

__version__ = "0.1.0"

__all__ = [
    "AxisReport", "AxisSpec", "BACKEND", "CausalCharacter", "DarbouxData", "FrenetData",
    "GeometryError", "InfeasibleAngle", "NotAnIsophote", "ParamSurface", "SampledCurve",
    "SilhouetteUndefined", "Vec3M", "analyze_curve", "angle_consistency", "arclength_resample",
    "builtin_surface", "causal_character", "classify", "cross", "darboux_apparatus",
    "extract_isophotes", "frenet_apparatus", "gauss_image_check", "illumination_field", "inner",
    "make_axis", "norm", "omega_function", "parse_surface_expr", "psi_function",
    "reconstruct_axis", "relation_check", "same_timecone", "surface_curve", "surface_from_spec",
    "surface_normal", "verify_axis_constant", "verify_spacelike",
]

"""Singular integrals of the restricted Clairaut equation x z_x + y z_y = z.

The complete integral is the plane family z = a x + b y. Coupling a and b
(b = phi(a), rel(a, b) = 0, (a, b) = g(theta) or (a, b) = m(x, y)) and
taking the envelope yields further solutions, sampled here as point clouds
with residuals, and checked against explicit and implicit target surfaces.
"""
from ._backend import BACKEND
from .analysis import Label, classify_locus, detect_cusp, detect_multivalued, invertibility_check
from .envelope import (EnvelopePoint, SampledSurface, cross_section_z1, envelope_branch,
                       envelope_function_constraint, envelope_inverse_map,
                       envelope_parametric_planes)
from .errors import (CandidateNotOnFamily, ClairautError, DegenerateDirection, DomainError,
                     ExcludedParameter, MaxIterations, NoBracket, NoRoots, NotOnSurface,
                     OutOfDomain, ParseError, SpecError, UnknownEntry, UnknownFunction,
                     VerticalTangent)
from .exprlang import Expr, evaluate, evaluate_d, parse
from .families import (FunctionOfA, ImplicitRelation, InverseMap, ParametricCurve, Plane,
                       PlaneFamily, enumerate_branches, plane_at, resolve)
from .numerics import DEFAULT, ToleranceConfig
from .verify import (ExplicitGraph, ImplicitLevelSet, clairaut_residual_explicit,
                     clairaut_residual_implicit, euler_residual, homogeneity_check,
                     implicit_membership, tangency_check)

__version__ = "0.1.0"

"""Dual curvature measures of origin-symmetric convex bodies.

Monte Carlo and quadrature tools for the q-th dual curvature measures, the
cone-volume measure and their subspace concentration ratios.
"""

from .bodies import (
    Ball,
    Ellipsoid,
    GeneralPolytopeV,
    PolytopeH,
    ProductCylinder,
    SymmetricBody,
    attaining_normals,
    contains,
    cube,
    cross_polytope,
    minkowski_lambda,
    radial,
    support,
)
from .concentration import (
    RatioReport,
    Verdict,
    check_scc_polytope,
    check_theorem_bound,
    concentration_ratio,
)
from .cylinder import CylinderCase, cyl_ratio, cyl_subspace_measure, cyl_sweep, cyl_total_measure
from .measures import (
    Complement,
    DualCurvatureQuery,
    FullSphere,
    SubspaceSphere,
    alpha_star_member,
    cone_volume_exact,
    dual_curvature,
    dual_curvature_euclidean,
    dual_quermass,
)
from .quadrature import MeasureEstimate, QuadratureSpec, integrate_sphere, integrate_unit_square, sample_sphere
from .subspace import Subspace, make_subspace
from .unimodal import GaugePower, PowerRadial, brunn_minkowski_check, lemma_check, lemma_integral

__version__ = "0.1.0"

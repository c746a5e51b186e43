"""High-order quadrature over implicitly defined curves, surfaces and regions.

The zero level set of ``F`` inside a box is integrated by meshing the box
into simplices, pushing mesh vertices off the level set, and mapping each
cut simplex's piece of the level set (or region) from a flat reference
element with rays cast from its lone-sign vertex.
"""

from .curve import CurveChart, curve_point_and_jacobian, integrate_curve, integrate_curve_triangle
from .errors import QuadError
from .expr import DualValue, Expression, eval_with_gradient, parse
from .fields import ExprField, FunctionField, ScalarField
from .geometry import Box, ElementCase, barycentric_point, classify_simplex
from .mesh import (
    DisplacementConfig,
    SimplicialMesh,
    displace_vertices,
    tetrahedralize_box,
    triangulate_rectangle,
    validate_mesh,
)
from .region import (
    integrate_region,
    integrate_region2d,
    integrate_region3d,
    integrate_region_tet,
    integrate_region_triangle,
)
from .rootfind import root_on_segment
from .rules import gauss_legendre_01, tet_rule, triangle_rule
from .surface import (
    SurfaceChart,
    integrate_surface,
    integrate_surface_tet,
    split_case2_tet,
    surface_point_and_jacobian,
)

__version__ = "0.1.0"

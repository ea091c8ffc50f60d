"""Toric vector bundles as Klyachko filtrations, PL maps to valuations and PL valuations."""

from .examples import example_tangent_pn, line_bundle, trivial_bundle
from .fan import Cone, Fan, FanError, class_in_M_sigma, common_refinement, subdivide_by_hyperplanes, wall_data
from .klyachko import (Filtration, Frame, IncompatibleFiltrations, KlyachkoBundle, VSValuation, build_bundle,
                       common_frame, curve_splitting, filtration_to_valuation, is_equivariantly_split,
                       leq_valuation, phi_eval, pl_valuation, refine_bundle, valuation_apply,
                       valuation_to_filtration)
from .linalg import Subspace
from .parliament import (Arrangement, character_arrangement, generic_ground_set, h0_all, h0_weight_dim_direct,
                         h0_weight_dim_matroid, klyachko_arrangement, parliament)
from .plfunc import PLFunction, Polytope, add_pl, is_concave, is_convex, lattice_points, leq_pl, min_pl, polytope_of
from .positivity import (is_ample, is_buildingwise_convex, is_fanwise_convex, is_globally_generated, is_nef,
                         positivity_report)
from .semiring import INF, PL, RATIONAL
from .tropical import (LinearConfiguration, NotATropicalPoint, TropPoint, bundle_from_diagram, circuits, diagram,
                       real_point_to_valuation, reconstruct_valuation, trop_membership)

__version__ = "0.1.0"

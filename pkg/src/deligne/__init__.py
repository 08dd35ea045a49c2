"""Discrete Deligne cohomology: holonomy, transgression, and cup products.

Classes of degree p live on a finite simplicial complex with a good cover
as collections of local data: transition logarithms on overlaps and
integrated form components on simplices.  The library validates the
descent conditions, evaluates holonomy sums over index-map flags, pushes
classes to boundaries, forms cup products of analytic presentations, and
serializes every artifact deterministically.
"""

from .analytic import (
    AnalyticClassPresentation,
    FormTerm,
    ZERO_EXPR,
    cup_product,
    discretize,
    evaluate_scalar,
    expr_product,
    expr_scale,
    expr_sum,
    flat_circle,
    integrate_form,
    monopole,
    torsion_class,
    winding_function,
    zero_class,
)
from .cochain import (
    CocycleReport,
    DeligneCochain,
    FailedCondition,
    IntegerCechCocycle,
    TrivializationReport,
    build_cochain,
    cech_delta,
    chern_cocycle,
    discrete_d,
    disjoint_union_cochains,
    dual,
    exact_shift,
    glue_cochains,
    random_cochain,
    restrict_cochain,
    reverse_cochain,
    tensor,
    validate_cocycle,
    verify_trivialization,
    zero_cochain,
)
from .cover import (
    CoveredComplex,
    IndexMap,
    attach_cover,
    default_index_map,
    make_index_map,
    random_index_map,
    restrict_cover,
    restrict_cover_to_boundary,
    restrict_index_map,
    star_cover,
)
from .errors import (
    AnalyticError,
    CochainError,
    ComplexError,
    CoverError,
    DeligneError,
    HolonomyError,
    TransgressionError,
)
from .geometry import (
    GEOMETRY_BUILDERS,
    ChartedGeometry,
    get_geometry,
    simplex_quadrature,
    subdivide_geometry,
    torus2_axis_loop,
    torus3_plane_slice,
)
from .holonomy import (
    CurvatureValue,
    HolonomyValue,
    LevelSum,
    check_index_map,
    curvature_total,
    holonomy,
    local_action,
)
from .io import (
    SchemaError,
    dumps_canonical,
    load_cochain,
    load_complex,
    load_cover,
    load_index_map,
    read_json,
    save_cochain,
    save_complex,
    save_cover,
    save_index_map,
    write_canonical,
)
from .simplicial import (
    Flag,
    SimplicialComplex,
    barycentric_subdivide,
    build_complex,
    disjoint_union,
    glue_along_boundary,
    incidence,
    relabel_complex,
    reverse_orientation,
)
from .transgression import (
    TransitionValue,
    TripleTransgressionValue,
    transgress_p3_triple,
    transition_boundary,
    transition_general,
    transition_p2_boundary,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticClassPresentation",
    "AnalyticError",
    "ChartedGeometry",
    "CochainError",
    "CocycleReport",
    "ComplexError",
    "CoveredComplex",
    "CoverError",
    "CurvatureValue",
    "DeligneCochain",
    "DeligneError",
    "FailedCondition",
    "Flag",
    "FormTerm",
    "GEOMETRY_BUILDERS",
    "HolonomyError",
    "HolonomyValue",
    "IndexMap",
    "IntegerCechCocycle",
    "LevelSum",
    "SchemaError",
    "SimplicialComplex",
    "TransgressionError",
    "TransitionValue",
    "TripleTransgressionValue",
    "TrivializationReport",
    "ZERO_EXPR",
    "attach_cover",
    "barycentric_subdivide",
    "build_cochain",
    "build_complex",
    "cech_delta",
    "check_index_map",
    "chern_cocycle",
    "cup_product",
    "curvature_total",
    "default_index_map",
    "discrete_d",
    "discretize",
    "disjoint_union",
    "disjoint_union_cochains",
    "dual",
    "dumps_canonical",
    "evaluate_scalar",
    "exact_shift",
    "expr_product",
    "expr_scale",
    "expr_sum",
    "flat_circle",
    "get_geometry",
    "glue_along_boundary",
    "glue_cochains",
    "holonomy",
    "incidence",
    "integrate_form",
    "load_cochain",
    "load_complex",
    "load_cover",
    "load_index_map",
    "local_action",
    "make_index_map",
    "monopole",
    "random_cochain",
    "random_index_map",
    "read_json",
    "relabel_complex",
    "restrict_cochain",
    "restrict_cover",
    "restrict_cover_to_boundary",
    "restrict_index_map",
    "reverse_cochain",
    "reverse_orientation",
    "save_cochain",
    "save_complex",
    "save_cover",
    "save_index_map",
    "simplex_quadrature",
    "star_cover",
    "subdivide_geometry",
    "tensor",
    "torsion_class",
    "torus2_axis_loop",
    "torus3_plane_slice",
    "transgress_p3_triple",
    "transition_boundary",
    "transition_general",
    "transition_p2_boundary",
    "validate_cocycle",
    "verify_trivialization",
    "winding_function",
    "write_canonical",
    "zero_class",
    "zero_cochain",
]

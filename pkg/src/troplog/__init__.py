"""Exact combinatorics of rational tropical curves mapping to the log torus."""

from .affine import AffineExpr, as_fraction
from .errors import (
    IncompleteFan,
    LengthMismatch,
    NonZeroSum,
    NoSuchEdge,
    NoSuchLeg,
    ParseError,
    TroplogError,
    UnstableRange,
    UnsupportedDimension,
)
from .moduli import (
    Cone,
    ConeComplex,
    FaceMap,
    IsomorphismReport,
    SelfMapNormalForm,
    TropicalMapPoint,
    build_map_moduli,
    build_moduli_complex,
    classify_self_map,
    product_decomposition,
    splitting_at_leg,
    splitting_expr,
    stabilize,
)
from .plfunction import (
    ContactOrder,
    Multidegree,
    PLFunction,
    extend_from_leg_slopes,
    is_balanced,
    multidegree,
    plfunction_from_json,
    plfunction_to_json,
    vertex_values,
)
from .feasibility import check_feasible, prune_redundant
from .subdivision import (
    Fan,
    FanCone,
    SubdividedCell,
    SubdividedComplex,
    face_census,
    subdivide_cone,
    subdivide_map_moduli,
    validate_fan,
)
from .tree import (
    CombinatorialType,
    Edge,
    Leg,
    Tree,
    ValidationReport,
    canonicalize,
    contract_edge,
    enumerate_tree_types,
    tree_from_json,
    tree_to_json,
    validate_tree,
)

__version__ = "0.1.0"

"""Moduli cone complexes of tropical curves and of maps to the log torus.

One cone per combinatorial type: edge-length coordinates for the curve
moduli, plus one free translation coordinate for map moduli (the
tropicalization of the log torus is the whole real line).  Face maps are
induced by edge contraction.  The product decomposition is certified
per-cone by an explicit unimodular affine change of coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .affine import AffineExpr, Rat, as_fraction, fraction_str
from .errors import LengthMismatch, NonZeroSum, NoSuchLeg, UnstableRange
from .plfunction import (
    ContactOrder,
    PLFunction,
    extend_from_leg_slopes,
    is_balanced,
    vertex_values,
)
from .tree import (
    CombinatorialType,
    Edge,
    Leg,
    Tree,
    VertexId,
    canonicalize,
    contract_edge,
    enumerate_tree_types,
    validate_tree,
)

TRANSLATION_COORD = "c"


@dataclass(frozen=True)
class Coord:
    name: str
    sign: str  # "nonneg" | "free"


@dataclass(frozen=True)
class Cone:
    """A rational cone chart with named coordinates.

    Nonnegative coordinates contribute their coordinate functionals as
    inequalities; free coordinates span lineality directions.
    """

    name: str
    coords: tuple[Coord, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def inequalities(self) -> tuple[AffineExpr, ...]:
        return tuple(AffineExpr.symbol(c.name) for c in self.coords if c.sign == "nonneg")

    def to_json(self) -> dict:
        return {
            "type_key": self.name,
            "coords": [{"name": c.name, "sign": c.sign} for c in self.coords],
            "facets": [str(f) for f in self.inequalities],
            "dim": self.dim,
        }


@dataclass(frozen=True)
class FaceMap:
    """Inclusion of the contracted type's cone as a facet of a larger cone."""

    face_key: str
    cone_key: str
    coord_map: tuple[tuple[str, str], ...]  # face coordinate -> cone coordinate
    zeroed: tuple[str, ...]  # cone coordinates set to 0 on the face

    def to_json(self) -> dict:
        return {
            "face": self.face_key,
            "cone": self.cone_key,
            "coord_map": {a: b for a, b in self.coord_map},
            "zeroed": list(self.zeroed),
        }


@dataclass
class ConeComplex:
    n: int
    cones: dict[str, Cone]
    types: dict[str, CombinatorialType]
    face_maps: list[FaceMap]
    sigma: ContactOrder | None = None
    functions: dict[str, PLFunction] = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return not self.cones

    def maximal_keys(self) -> list[str]:
        faces = {fm.face_key for fm in self.face_maps}
        return sorted(k for k in self.cones if k not in faces)

    def to_json(self) -> dict:
        doc = {
            "n": self.n,
            "cones": [self.cones[k].to_json() for k in sorted(self.cones)],
            "face_maps": [fm.to_json() for fm in sorted(self.face_maps, key=lambda f: (f.cone_key, f.zeroed, f.face_key))],
        }
        if self.sigma is not None:
            doc["sigma"] = list(self.sigma.slopes)
        if self.functions:
            from .plfunction import plfunction_to_json

            doc["functions"] = {k: plfunction_to_json(self.functions[k]) for k in sorted(self.functions)}
        return doc


def _face_maps_for(types: dict[str, CombinatorialType]) -> list[FaceMap]:
    out: dict[tuple, FaceMap] = {}
    for key, ct in types.items():
        for i in range(len(ct.tree.edges)):
            contracted = contract_edge(ct.tree, i)
            cf = canonicalize(contracted)
            coord_map = []
            for j in range(len(ct.tree.edges)):
                if j == i:
                    continue
                j_small = j if j < i else j - 1
                coord_map.append((f"l_e{cf.edge_map[j_small]}", f"l_e{j}"))
            fm = FaceMap(cf.key, key, tuple(sorted(coord_map)), (f"l_e{i}",))
            out.setdefault((fm.face_key, fm.cone_key, fm.coord_map, fm.zeroed), fm)
    return sorted(out.values(), key=lambda f: (f.cone_key, f.zeroed, f.face_key))


def build_moduli_complex(n: int) -> ConeComplex:
    """Cone complex of stable genus-0 tropical curves with n legs."""
    if n < 3:
        raise UnstableRange(f"curve moduli need n >= 3, got {n}")
    types = {ct.key: ct for ct in enumerate_tree_types(n, stable_only=True)}
    cones = {
        key: Cone(key, tuple(Coord(f"l_e{i}", "nonneg") for i in range(len(ct.tree.edges))))
        for key, ct in types.items()
    }
    return ConeComplex(n, cones, types, _face_maps_for(types))


def _basepoint(t: Tree) -> VertexId:
    return min(t.legs, key=lambda l: l.label).at


def _map_cones(n: int, sigmas: list[ContactOrder]) -> ConeComplex:
    m = len(sigmas)
    for s in sigmas:
        if s.n != n:
            raise LengthMismatch(f"contact order has {s.n} entries for n={n}")
        if not s.is_balanced:
            raise NonZeroSum(f"leg slopes sum to {s.total}, not 0")
    if n <= 1:
        # No nonconstant balanced functions, and constant maps are unstable.
        return ConeComplex(n, {}, {}, [], sigma=sigmas[0] if m == 1 else None)
    if n == 2:
        raise UnstableRange(
            "n = 2 maps are nonseparated as stable maps; use classify_self_map"
        )
    base = build_moduli_complex(n)
    c_names = [TRANSLATION_COORD] if m == 1 else [f"c{j+1}" for j in range(m)]
    cones = {}
    functions: dict[str, PLFunction] = {}
    for key, ct in base.types.items():
        coords = tuple(base.cones[key].coords) + tuple(Coord(cn, "free") for cn in c_names)
        cones[key] = Cone(key, coords)
        fs = [
            extend_from_leg_slopes(ct.tree, s, _basepoint(ct.tree), AffineExpr.symbol(cn))
            for s, cn in zip(sigmas, c_names)
        ]
        functions[key] = fs[0] if m == 1 else fs  # type: ignore[assignment]
    cx = ConeComplex(n, cones, base.types, base.face_maps, sigma=sigmas[0] if m == 1 else None)
    cx.functions = functions
    return cx


def build_map_moduli(n: int, sigma: ContactOrder) -> ConeComplex:
    """Moduli of stable genus-0 tropical maps to the 1-dimensional log torus.

    Each cone carries the symbolic balanced function with the given leg
    slopes, base value the free translation coordinate.
    """
    return _map_cones(n, [sigma])


# ---------------------------------------------------------------------------
# Map points, splittings, product decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TropicalMapPoint:
    """A concrete tree together with one balanced function per target coordinate."""

    tree: Tree
    functions: tuple[PLFunction, ...]
    contacts: tuple[ContactOrder, ...]

    def __post_init__(self):
        report = validate_tree(self.tree)
        if not report.ok:
            raise LengthMismatch(f"invalid tree: {'; '.join(report.problems)}")
        if not self.tree.is_concrete:
            raise LengthMismatch("map points require concrete edge lengths")
        if len(self.functions) != len(self.contacts):
            raise LengthMismatch("one contact order per target coordinate")
        for f, sigma in zip(self.functions, self.contacts):
            if f.tree != self.tree:
                raise LengthMismatch("function lives on a different tree")
            if f.leg_slopes != sigma.slopes:
                raise LengthMismatch("leg slopes do not match contact data")
            if not is_balanced(f):
                raise NonZeroSum("function is not balanced")

    @staticmethod
    def of(tree: Tree, functions) -> "TropicalMapPoint":
        fs = tuple(functions)
        return TropicalMapPoint(tree, fs, tuple(f.contact_order for f in fs))


def splitting_at_leg(p: TropicalMapPoint, label: int) -> Fraction:
    """Value of the (1-dimensional target) function at the leg's attachment vertex."""
    if len(p.functions) != 1:
        raise LengthMismatch("splitting_at_leg requires a 1-dimensional target")
    if label not in p.tree.leg_labels:
        raise NoSuchLeg(f"no leg labeled {label}")
    value = vertex_values(p.functions[0])[p.tree.leg(label).at]
    if not value.is_constant:
        raise LengthMismatch("map point has symbolic values")
    return value.const


def splitting_expr(complex_: ConeComplex, key: str, label: int) -> AffineExpr:
    """Symbolic splitting on one cone: the function's value at leg ``label``."""
    f = complex_.functions[key]
    ct = complex_.types[key]
    if label not in ct.tree.leg_labels:
        raise NoSuchLeg(f"no leg labeled {label}")
    return vertex_values(f)[ct.tree.leg(label).at]


@dataclass
class IsomorphismReport:
    """Constructive certificate that map moduli = curve moduli x free line."""

    certified: bool
    n: int
    sigma: ContactOrder
    leg: int
    cones_checked: int
    cone_maps: dict[str, str]
    face_checks: int
    failures: list[str]
    distinct_splittings: dict[int, dict | None]

    def to_json(self) -> dict:
        return {
            "certified": self.certified,
            "n": self.n,
            "sigma": list(self.sigma.slopes),
            "leg": self.leg,
            "cones_checked": self.cones_checked,
            "cone_maps": dict(sorted(self.cone_maps.items())),
            "face_checks": self.face_checks,
            "failures": list(self.failures),
            "distinct_splittings": {str(j): w for j, w in sorted(self.distinct_splittings.items())},
        }


def _concrete_point(ct: CombinatorialType, sigma: ContactOrder, lengths=None) -> TropicalMapPoint:
    t = ct.tree.with_lengths(lengths or [1] * len(ct.tree.edges))
    f = extend_from_leg_slopes(t, sigma, _basepoint(t), 0)
    return TropicalMapPoint.of(t, [f])


def product_decomposition(n: int, sigma: ContactOrder, leg: int) -> IsomorphismReport:
    """Certify the isomorphism between map moduli and curve moduli x line.

    Per cone: the coordinate change (lengths..., c) -> (lengths..., value at
    leg ``leg``) is affine with unit coefficient on c and integer length
    coefficients, hence unimodular; it commutes with every face map.  A
    witness point separating the splittings at ``leg`` and every other leg
    is exhibited when one exists (for the single-vertex type none can).
    """
    if n < 3:
        raise UnstableRange(f"product decomposition needs n >= 3, got {n}")
    mapc = build_map_moduli(n, sigma)
    curve = build_moduli_complex(n)
    if leg not in range(1, n + 1):
        raise NoSuchLeg(f"no leg labeled {leg}")

    failures: list[str] = []
    cone_maps: dict[str, str] = {}
    splittings: dict[str, AffineExpr] = {}
    for key in mapc.cones:
        s = splitting_expr(mapc, key, leg)
        splittings[key] = s
        cone_maps[key] = str(s)
        if s.coeff(TRANSLATION_COORD) != 1:
            failures.append(f"cone {key}: translation coefficient is not 1")
        for name, coeff in s.terms:
            if name != TRANSLATION_COORD and coeff.denominator != 1:
                failures.append(f"cone {key}: non-integer coefficient on {name}")
        curve_coords = {c.name for c in curve.cones[key].coords}
        map_coords = {c.name for c in mapc.cones[key].coords}
        if map_coords != curve_coords | {TRANSLATION_COORD}:
            failures.append(f"cone {key}: coordinates do not match curve cone plus free line")

    # Face-map compatibility: restricting the splitting to a facet agrees
    # with the splitting computed on the contracted type.
    face_checks = 0
    for fm in mapc.face_maps:
        face_checks += 1
        big = splittings[fm.cone_key]
        restricted = big.substitute({z: 0 for z in fm.zeroed})
        renamed = restricted.substitute(
            {cone_coord: AffineExpr.symbol(face_coord) for face_coord, cone_coord in fm.coord_map}
        )
        if renamed != splittings[fm.face_key]:
            failures.append(
                f"face map {fm.cone_key} -> {fm.face_key}: splitting not compatible"
            )

    distinct: dict[int, dict | None] = {}
    for other in range(1, n + 1):
        if other == leg:
            continue
        witness = None
        for key in sorted(mapc.cones):
            diff = splittings[key] - splitting_expr(mapc, key, other)
            if diff.is_zero:
                continue
            point = _concrete_point(mapc.types[key], sigma)
            vi = splitting_at_leg(point, leg)
            vj = splitting_at_leg(point, other)
            if vi != vj:
                witness = {
                    "cone": key,
                    "lengths": {f"l_e{i}": "1" for i in range(len(mapc.types[key].tree.edges))},
                    "c": "0",
                    f"splitting_{leg}": fraction_str(vi),
                    f"splitting_{other}": fraction_str(vj),
                }
                break
        distinct[other] = witness  # None e.g. for n=3: all legs share one vertex

    certified = not failures
    return IsomorphismReport(
        certified=certified,
        n=n,
        sigma=sigma,
        leg=leg,
        cones_checked=len(mapc.cones),
        cone_maps=cone_maps,
        face_checks=face_checks,
        failures=failures,
        distinct_splittings=distinct,
    )


# ---------------------------------------------------------------------------
# Stabilization
# ---------------------------------------------------------------------------


def _rebuild(point: TropicalMapPoint, tree: Tree, values: list[dict[VertexId, AffineExpr]]) -> TropicalMapPoint:
    bp = _basepoint(tree) if tree.legs else tree.vertices[0]
    fs = [
        extend_from_leg_slopes(tree, sigma, bp, vals[bp])
        for sigma, vals in zip(point.contacts, values)
    ]
    return TropicalMapPoint(tree, tuple(fs), point.contacts)


def stabilize(p: TropicalMapPoint) -> TropicalMapPoint:
    """Contract away vertices where the map is constant and valence < 3.

    A removed 2-valent vertex merges its two edges, adding lengths; a
    1-valent constant vertex drops its sprout edge.  2-valent vertices with
    nonzero through-slope are kept: the map is nonconstant there.
    """
    current = p
    while True:
        t = current.tree
        values = [vertex_values(f) for f in current.functions]
        adj = t.adjacency()
        target = None
        for v in t.vertices:
            incident = adj[v]
            legs_here = t.legs_at(v)
            if len(incident) + len(legs_here) >= 3:
                continue
            slopes_zero = all(
                f.slope(v, w, i) == 0 for f in current.functions for w, i in incident
            ) and all(
                f.leg_slope(l.label) == 0 for f in current.functions for l in legs_here
            )
            if not slopes_zero:
                continue
            if len(incident) == 2 and not legs_here:
                target = ("merge", v, incident)
                break
            if len(incident) == 1:
                target = ("contract", v, incident)
                break
        if target is None:
            return current

        kind, v, incident = target
        if kind == "merge":
            (w1, i1), (w2, i2) = incident
            total = t.edges[i1].length + t.edges[i2].length
            edges = tuple(
                e for i, e in enumerate(t.edges) if i not in (i1, i2)
            ) + (Edge((w1, w2), total),)
            vertices = tuple(x for x in t.vertices if x != v)
            legs = t.legs  # none at v by construction
            new_tree = Tree(vertices, edges, legs)
        else:
            (w, i) = incident[0]
            # Merge v into its neighbor; legs at v re-attach to w.
            vertices = tuple(x for x in t.vertices if x != v)
            edges = tuple(e for j, e in enumerate(t.edges) if j != i)
            legs = tuple(Leg(l.label, w if l.at == v else l.at) for l in t.legs)
            new_tree = Tree(vertices, edges, legs)
        current = _rebuild(current, new_tree, values)


# ---------------------------------------------------------------------------
# Self-maps of the log torus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelfMapNormalForm:
    """Normal form t -> degree * t + translation; kernel has |degree| elements."""

    degree: int
    translation: Fraction

    @property
    def kernel_order(self) -> int:
        return abs(self.degree)

    def compose(self, other: "SelfMapNormalForm") -> "SelfMapNormalForm":
        """self after other: substitute other's map into self's."""
        return SelfMapNormalForm(
            self.degree * other.degree, self.translation + self.degree * other.translation
        )

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "translation": fraction_str(self.translation),
            "kernel_order": self.kernel_order,
        }


def classify_self_map(r: int, a: Rat) -> SelfMapNormalForm:
    """Discrete classification data of a self-map of the log torus."""
    return SelfMapNormalForm(int(r), as_fraction(a))

"""Complete fans and the pullback subdivision of map-moduli cones.

A complete fan in the target line (or plane) pulls back, through the
per-vertex value functionals of the symbolic balanced function, to a
subdivision of every moduli cone: one maximal cell per feasible
full-dimensional assignment of vertex images to fan cones.  All geometry
runs through the exact feasibility kernel.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .affine import AffineExpr, fraction_str
from .errors import IncompleteFan, LengthMismatch, ParseError, UnsupportedDimension
from .feasibility import (
    Constraint,
    canonical_system,
    check_feasible,
    normalize,
    prune_redundant,
)
from .moduli import Cone, ConeComplex, _map_cones
from .plfunction import ContactOrder, vertex_values
from .tree import ValidationReport, VertexId

Vector = tuple[int, ...]


def _primitive(v: Vector) -> Vector:
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g else v


@dataclass(frozen=True)
class FanCone:
    """A rational cone given by integer ray generators.

    The halfspace description (normal, relation) with relation 'ge' or 'eq'
    is derived on construction; only ambient dimensions 1 and 2 are handled.
    """

    gens: tuple[Vector, ...]
    halfspaces: tuple[tuple[Vector, str], ...] = field(default=(), compare=False)
    dim: int = field(default=0, compare=False)

    @staticmethod
    def of(gens, ambient: int) -> "FanCone":
        rays = []
        for g in gens:
            v = tuple(int(x) for x in g)
            if len(v) != ambient:
                raise ParseError(f"generator {g} has wrong dimension")
            if any(v):
                p = _primitive(v)
                if p not in rays:
                    rays.append(p)
        halfspaces, dim = _derive_halfspaces(tuple(rays), ambient)
        return FanCone(tuple(rays), halfspaces, dim)


def _angle_cmp(a: Vector, b: Vector) -> int:
    """Exact counterclockwise angle comparison of 2D integer vectors."""

    def half(v):
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    ha, hb = half(a), half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    cross = a[0] * b[1] - a[1] * b[0]
    return 0 if cross == 0 else (-1 if cross > 0 else 1)


def _derive_halfspaces(rays: tuple[Vector, ...], ambient: int):
    if ambient == 1:
        signs = {1 if r[0] > 0 else -1 for r in rays}
        if not signs:
            return (((1,), "eq"),), 0
        if signs == {1}:
            return (((1,), "ge"),), 1
        if signs == {-1}:
            return (((-1,), "ge"),), 1
        return (), 1
    if ambient == 2:
        if not rays:
            return (((1, 0), "eq"), ((0, 1), "eq")), 0
        if len(rays) == 1:
            (gx, gy) = rays[0]
            return (((-gy, gx), "eq"), ((gx, gy), "ge")), 1
        # Candidate facet normals: rotations of the rays that see every ray
        # on their nonnegative side.
        candidates = []
        for gx, gy in rays:
            for n in ((-gy, gx), (gy, -gx)):
                if all(n[0] * rx + n[1] * ry >= 0 for rx, ry in rays):
                    if n not in candidates:
                        candidates.append(_primitive(n))
        pos = [n for n in candidates if tuple(-x for x in n) not in candidates]
        eqs = sorted({max(n, tuple(-x for x in n)) for n in candidates if tuple(-x for x in n) in candidates})
        if eqs:
            # All rays on one line.
            return tuple((n, "eq") for n in eqs), 1
        if not pos:
            return (), 2  # positively spanning: the whole plane
        return tuple((n, "ge") for n in sorted(pos)), 2
    raise UnsupportedDimension(f"fans only supported in dimension <= 2, got {ambient}")


@dataclass(frozen=True)
class Fan:
    dim: int
    cones: tuple[FanCone, ...]
    complete: bool = True

    @staticmethod
    def of(gens_list, dim: int, complete: bool = True) -> "Fan":
        return Fan(dim, tuple(FanCone.of(g, dim) for g in gens_list), complete)

    @staticmethod
    def projective_line() -> "Fan":
        """The fan of P^1: both rays and the origin."""
        return Fan.of([[(1,)], [(-1,)], []], 1)

    @staticmethod
    def trivial(dim: int = 1) -> "Fan":
        """Single non-strictly convex cone equal to the whole space."""
        if dim == 1:
            return Fan.of([[(1,), (-1,)]], 1)
        if dim == 2:
            return Fan.of([[(1, 0), (-1, 0), (0, 1), (0, -1)]], 2)
        raise UnsupportedDimension(f"dimension {dim} not supported")

    def maximal_cones(self) -> list[tuple[int, FanCone]]:
        return [(i, c) for i, c in enumerate(self.cones) if c.dim == self.dim]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "complete": self.complete,
            "cones": [{"gens": [list(g) for g in c.gens]} for c in self.cones],
        }

    @staticmethod
    def from_json(doc: dict) -> "Fan":
        try:
            dim = int(doc["dim"])
            gens_list = [c["gens"] for c in doc["cones"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed fan document: {exc}") from exc
        return Fan.of(gens_list, dim, bool(doc.get("complete", True)))


_XVARS = ("x0", "x1")


def _cone_system(c: FanCone, ambient: int) -> list[Constraint]:
    out = []
    for normal, rel in c.halfspaces:
        expr = AffineExpr.make(0, {_XVARS[k]: normal[k] for k in range(ambient)})
        out.append((expr, rel))
    return out


def _contains(outer: list[Constraint], inner: list[Constraint]) -> bool:
    """Is every point of ``inner`` in ``outer``?"""
    for expr, rel in outer:
        if rel in ("ge", "gt"):
            if check_feasible(inner + [(-expr, "gt")]).feasible:
                return False
        else:
            if check_feasible(inner + [(expr, "gt")]).feasible:
                return False
            if check_feasible(inner + [(-expr, "gt")]).feasible:
                return False
    return True


def _point_in_cone(c: FanCone, point: Vector, ambient: int) -> bool:
    for normal, rel in c.halfspaces:
        val = sum(n * p for n, p in zip(normal, point))
        if rel == "eq" and val != 0:
            return False
        if rel == "ge" and val < 0:
            return False
    return True


def validate_fan(fan: Fan) -> ValidationReport:
    """Check pairwise face intersections, and coverage when completeness is claimed."""
    problems: list[str] = []
    if fan.dim > 2:
        raise UnsupportedDimension("fan validation supported only for dimension <= 2")
    systems = [_cone_system(c, fan.dim) for c in fan.cones]
    for i, j in itertools.combinations(range(len(fan.cones)), 2):
        inter = systems[i] + systems[j]
        if not check_feasible(inter).feasible:
            problems.append(f"cones {i} and {j} do not intersect (missing common face 0)")
            continue
        for k in (i, j):
            # The smallest face of cone k containing the intersection is cut
            # out by the halfspaces tight on it; require equality.
            tight: list[Constraint] = []
            for expr, rel in systems[k]:
                if rel == "ge" and not check_feasible(inter + [(expr, "gt")]).feasible:
                    tight.append((expr, "eq"))
            face = systems[k] + tight
            if not (_contains(face, inter) and _contains(inter, face)):
                problems.append(f"intersection of cones {i} and {j} is not a face of cone {k}")
    if fan.complete:
        problems.extend(_coverage_problems(fan))
    return ValidationReport(tuple(problems))


def _coverage_problems(fan: Fan) -> list[str]:
    if fan.dim == 1:
        probes = [(1,), (-1,)]
    else:
        rays = sorted(
            {r for c in fan.cones for r in c.gens}, key=functools.cmp_to_key(_angle_cmp)
        )
        if not rays:
            probes = [(1, 0), (-1, 0), (0, 1), (0, -1)]
        elif len(rays) == 1:
            g = rays[0]
            probes = [g, (-g[0], -g[1]), (-g[1], g[0]), (g[1], -g[0])]
        else:
            probes = list(rays)
            for a, b in zip(rays, rays[1:] + rays[:1]):
                cross = a[0] * b[1] - a[1] * b[0]
                if a == b or cross > 0:
                    mid = (a[0] + b[0], a[1] + b[1])
                elif cross == 0:
                    mid = (-a[1], a[0])  # opposite rays: probe one side of the gap
                else:
                    # gap wider than a half-plane: the antipode of the short
                    # bisector lies inside it
                    mid = (-a[0] - b[0], -a[1] - b[1])
                    if mid == (0, 0):
                        mid = (a[1], -a[0])
                probes.append(mid)
    out = []
    for p in probes:
        if not any(_point_in_cone(c, p, fan.dim) for c in fan.cones):
            out.append(f"claimed complete, but direction {list(p)} is not covered")
    return out


# ---------------------------------------------------------------------------
# Subdivision
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubdividedCell:
    parent: str
    assignment: tuple[tuple[str, int], ...]  # vertex -> fan cone index
    halfspaces: tuple[AffineExpr, ...]  # each >= 0
    witness: tuple[tuple[str, Fraction], ...]
    dim: int

    @property
    def key(self):
        return canonical_system([(h, "ge") for h in self.halfspaces])

    def contains(self, point: dict[str, Fraction]) -> bool:
        return all(h.evaluate(point) >= 0 for h in self.halfspaces)

    def strictly_contains(self, point: dict[str, Fraction]) -> bool:
        return all(h.evaluate(point) > 0 for h in self.halfspaces)

    def to_json(self) -> dict:
        return {
            "parent": self.parent,
            "assignment": {v: i for v, i in self.assignment},
            "halfspaces": [str(h) for h in self.halfspaces],
            "witness": {k: fraction_str(v) for k, v in self.witness},
            "dim": self.dim,
        }


def subdivide_cone(
    K: Cone,
    vertex_functionals: dict[tuple[VertexId, int], AffineExpr],
    fan: Fan,
) -> list[SubdividedCell]:
    """Maximal cells of the pullback subdivision of K along the fan.

    Each cell fixes, for every vertex, the fan cone containing its image
    vector of values; a cell survives iff it meets the interior of K, and
    identical cells arising from different assignments are merged.
    """
    if not fan.complete:
        raise IncompleteFan("subdivision requires a complete target fan")
    vertices = sorted({v for v, _ in vertex_functionals}, key=str)
    for v in vertices:
        for j in range(fan.dim):
            if (v, j) not in vertex_functionals:
                raise LengthMismatch(f"missing functional for vertex {v!r}, coordinate {j}")
    base: list[Constraint] = [(ineq, "ge") for ineq in K.inequalities]
    maximal = fan.maximal_cones()
    coords = [c.name for c in K.coords]

    cells: dict[tuple, SubdividedCell] = {}
    for choice in itertools.product(range(len(maximal)), repeat=len(vertices)):
        constraints = list(base)
        for v, pick in zip(vertices, choice):
            _, fc = maximal[pick]
            for normal, rel in fc.halfspaces:
                expr = AffineExpr()
                for j in range(fan.dim):
                    expr = expr + vertex_functionals[(v, j)] * normal[j]
                constraints.append((expr, rel))
        if any(e.is_constant and e.const < 0 for e, _ in constraints):
            continue
        # Interior test: strict versions of the nontrivial constraints;
        # identically-satisfied walls (e.g. a functional that is 0 on all
        # of K) impose nothing.
        interior = check_feasible(
            [(e, "gt") for e, _ in constraints if not e.is_constant], coords
        )
        if not interior.feasible:
            continue
        pruned = prune_redundant([(e, "ge") for e, _ in constraints if not e.is_constant])
        halfspaces = tuple(sorted((e for e, _ in pruned), key=str))
        cell = SubdividedCell(
            parent=K.name,
            assignment=tuple((str(v), maximal[pick][0]) for v, pick in zip(vertices, choice)),
            halfspaces=halfspaces,
            witness=tuple(sorted((k, interior.witness[k]) for k in coords)),
            dim=K.dim,
        )
        cells.setdefault(cell.key, cell)
    return [cells[k] for k in sorted(cells)]


def _rank(rows: list[tuple[Fraction, ...]]) -> int:
    m = [list(r) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pr = m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                factor = m[r][col] / pr[col]
                m[r] = [a - factor * b for a, b in zip(m[r], pr)]
        rank += 1
    return rank


def face_census(K: Cone, cells: list[SubdividedCell]) -> dict[int, int]:
    """f-vector of the cell complex inside K, by sign-pattern enumeration.

    The distinct normalized wall functionals (cell halfspaces plus the
    facets of K) cut K into relatively open faces; each feasible sign
    pattern is one face, of dimension (#coords - rank of its zero set).
    """
    coords = [c.name for c in K.coords]
    k_facets = {canonical_system([(f, "ge")])[0] for f in K.inequalities}
    funcs: dict[tuple, AffineExpr] = {}
    for f in K.inequalities:
        funcs.setdefault(canonical_system([(f, "ge")])[0], normalize((f, "ge"))[0])
    for cell in cells:
        for h in cell.halfspaces:
            key = canonical_system([(h, "ge")])[0]
            neg = canonical_system([(-h, "ge")])[0]
            if neg not in funcs:
                funcs.setdefault(key, normalize((h, "ge"))[0])
    items = sorted(funcs.items())
    counts: dict[int, int] = {}
    domains = [
        ("0", "+") if key in k_facets else ("-", "0", "+") for key, _ in items
    ]
    for signs in itertools.product(*domains):
        system: list[Constraint] = []
        zero_rows = []
        for (key, expr), s in zip(items, signs):
            if s == "0":
                system.append((expr, "eq"))
                zero_rows.append(tuple(expr.coeff(c) for c in coords))
            elif s == "+":
                system.append((expr, "gt"))
            else:
                system.append((-expr, "gt"))
        if not check_feasible(system, coords).feasible:
            continue
        d = len(coords) - _rank(zero_rows)
        counts[d] = counts.get(d, 0) + 1
    return dict(sorted(counts.items()))


@dataclass
class SubdividedComplex:
    complex: ConeComplex
    fan: Fan
    cells: dict[str, list[SubdividedCell]]

    def stats(self) -> dict:
        per_cone = {
            key: {
                "max_cells": len(cs),
                "dim": self.complex.cones[key].dim,
                "f_vector": face_census(self.complex.cones[key], cs),
            }
            for key, cs in self.cells.items()
        }
        return {
            "total_max_cells": sum(len(cs) for cs in self.cells.values()),
            "per_cone": dict(sorted(per_cone.items())),
        }

    def to_json(self) -> dict:
        stats = self.stats()
        stats["per_cone"] = {
            k: {**v, "f_vector": {str(d): c for d, c in v["f_vector"].items()}}
            for k, v in stats["per_cone"].items()
        }
        return {
            "complex": self.complex.to_json(),
            "fan": self.fan.to_json(),
            "cells": {
                key: [c.to_json() for c in cs] for key, cs in sorted(self.cells.items())
            },
            "statistics": stats,
        }


def cone_functionals(cx: ConeComplex, key: str) -> dict[tuple[VertexId, int], AffineExpr]:
    """Per-vertex value functionals of the symbolic function(s) on one cone."""
    fs = cx.functions[key]
    if not isinstance(fs, (list, tuple)):
        fs = [fs]
    out: dict[tuple[VertexId, int], AffineExpr] = {}
    for j, f in enumerate(fs):
        for v, val in vertex_values(f).items():
            out[(v, j)] = val
    return out


def subdivide_map_moduli(n: int, sigmas, fan: Fan) -> SubdividedComplex:
    """Subdivide every cone of the map moduli by the pullback of the fan.

    ``sigmas`` is one ContactOrder (target dimension 1) or a list of m of
    them (target dimension m, desk scale m <= 2); the fan dimension must
    match.
    """
    if isinstance(sigmas, ContactOrder):
        sigmas = [sigmas]
    if fan.dim != len(sigmas):
        raise LengthMismatch(
            f"fan dimension {fan.dim} does not match {len(sigmas)} contact orders"
        )
    if not fan.complete:
        raise IncompleteFan("subdivision requires a complete target fan")
    cx = _map_cones(n, list(sigmas))
    cells = {
        key: subdivide_cone(cx.cones[key], cone_functionals(cx, key), fan)
        for key in cx.cones
    }
    return SubdividedComplex(cx, fan, cells)

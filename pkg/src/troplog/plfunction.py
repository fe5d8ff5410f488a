"""Integer-sloped piecewise-linear functions on trees.

The core construction is ``extend_from_leg_slopes``: given outgoing slopes
on the legs summing to zero, there is a unique balanced function with a
prescribed value at a basepoint.  The slope on an internal edge is the sum
of the leg slopes on the far side of the edge (the cut rule), computed in
one depth-first pass.
"""

from __future__ import annotations

from dataclasses import dataclass

from .affine import AffineExpr, Rat
from .errors import LengthMismatch, NonZeroSum, NoSuchLeg, ParseError
from .tree import Tree, VertexId, tree_from_json, tree_to_json


@dataclass(frozen=True)
class ContactOrder:
    """Vector of outgoing integer slopes on the n labeled legs."""

    slopes: tuple[int, ...]

    @staticmethod
    def of(values) -> "ContactOrder":
        return ContactOrder(tuple(int(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.slopes)

    @property
    def total(self) -> int:
        return sum(self.slopes)

    @property
    def is_balanced(self) -> bool:
        """Membership in the zero-sum subgroup of Z^n."""
        return self.total == 0

    def __add__(self, other: "ContactOrder") -> "ContactOrder":
        if self.n != other.n:
            raise LengthMismatch("cannot add contact orders of different lengths")
        return ContactOrder(tuple(a + b for a, b in zip(self.slopes, other.slopes)))


@dataclass(frozen=True)
class Multidegree:
    degrees: tuple[tuple[VertexId, int], ...]

    def degree(self, v: VertexId) -> int:
        return dict(self.degrees)[v]

    @property
    def total(self) -> int:
        return sum(d for _, d in self.degrees)

    @property
    def is_zero(self) -> bool:
        return all(d == 0 for _, d in self.degrees)


@dataclass(frozen=True)
class PLFunction:
    """A PL function stored as a basepoint value plus directed slopes.

    ``edge_slopes[i]`` is the slope along ``tree.edges[i].ends`` read
    first-to-second; the reverse direction is its negation.  ``leg_slopes``
    are outgoing toward infinity and are indexed by leg label order.
    """

    tree: Tree
    basepoint: VertexId
    base_value: AffineExpr
    edge_slopes: tuple[int, ...]
    leg_slopes: tuple[int, ...]

    def __post_init__(self):
        if len(self.edge_slopes) != len(self.tree.edges):
            raise LengthMismatch("one slope per edge required")
        if len(self.leg_slopes) != len(self.tree.legs):
            raise LengthMismatch("one slope per leg required")
        if self.basepoint not in self.tree.vertices:
            raise ParseError(f"basepoint {self.basepoint!r} is not a vertex")

    def slope(self, v: VertexId, w: VertexId, edge_index: int) -> int:
        a, b = self.tree.edges[edge_index].ends
        if (v, w) == (a, b):
            return self.edge_slopes[edge_index]
        if (v, w) == (b, a):
            return -self.edge_slopes[edge_index]
        raise ParseError(f"edge {edge_index} does not join {v!r} and {w!r}")

    def leg_slope(self, label: int) -> int:
        labels = self.tree.leg_labels
        if label not in labels:
            raise NoSuchLeg(f"no leg labeled {label}")
        return self.leg_slopes[labels.index(label)]

    @property
    def contact_order(self) -> ContactOrder:
        """Outgoing slopes on the legs, in label order."""
        return ContactOrder(self.leg_slopes)

    def __add__(self, other: "PLFunction") -> "PLFunction":
        if self.tree != other.tree or self.basepoint != other.basepoint:
            raise LengthMismatch("can only add functions on the same tree and basepoint")
        return PLFunction(
            self.tree,
            self.basepoint,
            self.base_value + other.base_value,
            tuple(a + b for a, b in zip(self.edge_slopes, other.edge_slopes)),
            tuple(a + b for a, b in zip(self.leg_slopes, other.leg_slopes)),
        )


def vertex_values(f: PLFunction) -> dict[VertexId, AffineExpr]:
    """Propagate the basepoint value along the tree: value(w) = value(v) + slope * length."""
    t = f.tree
    adj = t.adjacency()
    values: dict[VertexId, AffineExpr] = {f.basepoint: f.base_value}
    stack = [f.basepoint]
    while stack:
        v = stack.pop()
        for w, i in adj[v]:
            if w in values:
                continue
            length = t.edges[i].length
            step = (
                AffineExpr.symbol(t.length_symbol(i))
                if length is None
                else AffineExpr.constant(length)
            )
            values[w] = values[v] + step * f.slope(v, w, i)
            stack.append(w)
    if len(values) != len(t.vertices):
        raise ParseError("tree is disconnected; vertex values undefined")
    return values


def multidegree(f: PLFunction) -> Multidegree:
    """Per-vertex sum of outgoing slopes over incident edges and legs."""
    t = f.tree
    deg = {v: 0 for v in t.vertices}
    for i, e in enumerate(t.edges):
        a, b = e.ends
        deg[a] += f.edge_slopes[i]
        deg[b] -= f.edge_slopes[i]
    labels = t.leg_labels
    for l in t.legs:
        deg[l.at] += f.leg_slopes[labels.index(l.label)]
    return Multidegree(tuple((v, deg[v]) for v in t.vertices))


def is_balanced(f: PLFunction) -> bool:
    return multidegree(f).is_zero


def extend_from_leg_slopes(
    t: Tree,
    sigma: ContactOrder,
    basepoint: VertexId | None = None,
    base_value: AffineExpr | Rat = 0,
) -> PLFunction:
    """The unique balanced PL function with leg slopes ``sigma`` and the
    given basepoint value.

    Exists iff the slopes sum to zero; the slope directed v -> w is the sum
    of the leg slopes in the component of w after cutting the edge.
    """
    if sigma.n != t.n_legs:
        raise LengthMismatch(f"{sigma.n} slopes for a tree with {t.n_legs} legs")
    if not sigma.is_balanced:
        raise NonZeroSum(f"leg slopes sum to {sigma.total}, not 0")
    if basepoint is None:
        basepoint = min(t.legs, key=lambda l: l.label).at if t.legs else t.vertices[0]

    labels = t.leg_labels
    leg_sum = {v: 0 for v in t.vertices}
    for l in t.legs:
        leg_sum[l.at] += sigma.slopes[labels.index(l.label)]

    adj = t.adjacency()
    # Iterative post-order from the basepoint accumulating subtree leg sums.
    order: list[tuple[VertexId, VertexId | None, int | None]] = []
    stack: list[tuple[VertexId, VertexId | None, int | None]] = [(basepoint, None, None)]
    seen = {basepoint}
    while stack:
        v, parent, via = stack.pop()
        order.append((v, parent, via))
        for w, i in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append((w, v, i))
    subtree = dict(leg_sum)
    edge_slope = [0] * len(t.edges)
    for v, parent, via in reversed(order):
        if parent is not None and via is not None:
            subtree[parent] += subtree[v]
            a, _b = t.edges[via].ends
            # Slope directed parent -> v is the leg sum beyond v.
            edge_slope[via] = subtree[v] if a == parent else -subtree[v]

    if not isinstance(base_value, AffineExpr):
        base_value = AffineExpr.constant(base_value)
    return PLFunction(t, basepoint, base_value, tuple(edge_slope), tuple(sigma.slopes))


# ---------------------------------------------------------------------------
# JSON round-trip
# ---------------------------------------------------------------------------


def plfunction_to_json(f: PLFunction) -> dict:
    doc = tree_to_json(f.tree)
    labels = f.tree.leg_labels
    doc.update(
        {
            "basepoint": f.basepoint,
            "base_value": f.base_value.to_json(),
            "edge_slopes": [
                {"from": e.ends[0], "to": e.ends[1], "slope": s}
                for e, s in zip(f.tree.edges, f.edge_slopes)
            ],
            "leg_slopes": {str(lbl): s for lbl, s in zip(labels, f.leg_slopes)},
        }
    )
    return doc


def plfunction_from_json(doc: dict) -> PLFunction:
    t = tree_from_json(doc)
    try:
        base_value = AffineExpr.parse(str(doc["base_value"]))
        slopes_by_pair = {}
        for rec in doc["edge_slopes"]:
            slopes_by_pair[(rec["from"], rec["to"])] = int(rec["slope"])
        edge_slopes = []
        for e in t.edges:
            a, b = e.ends
            if (a, b) in slopes_by_pair:
                edge_slopes.append(slopes_by_pair[(a, b)])
            elif (b, a) in slopes_by_pair:
                edge_slopes.append(-slopes_by_pair[(b, a)])
            else:
                raise ParseError(f"missing slope for edge {a!r}-{b!r}")
        leg_slopes = [int(doc["leg_slopes"][str(lbl)]) for lbl in t.leg_labels]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed PL function document: {exc}") from exc
    return PLFunction(t, doc["basepoint"], base_value, tuple(edge_slopes), tuple(leg_slopes))

"""Genus-0 tropical curves: finite metric trees with labeled infinite legs.

A tree is "concrete" when every bounded edge carries a nonnegative rational
length, and "symbolic" when lengths are left as named coordinates (one per
edge); the same data structure serves as a metric object and as the chart
of a moduli cone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .affine import Rat, as_fraction, fraction_str
from .errors import NoSuchEdge, ParseError, UnstableRange

VertexId = str | int


@dataclass(frozen=True)
class Edge:
    ends: tuple[VertexId, VertexId]
    length: Fraction | None = None  # None = symbolic length coordinate


@dataclass(frozen=True)
class Leg:
    label: int
    at: VertexId


@dataclass(frozen=True)
class Tree:
    vertices: tuple[VertexId, ...]
    edges: tuple[Edge, ...]
    legs: tuple[Leg, ...]

    @staticmethod
    def build(vertices, edges, legs, lengths=None) -> "Tree":
        """Convenience constructor from plain lists.

        ``edges`` is a list of (a, b) pairs or (a, b, length) triples;
        ``legs`` a list of (label, vertex) pairs.  ``lengths``, if given,
        applies one length to every edge.
        """
        es = []
        for e in edges:
            if len(e) == 3:
                a, b, ln = e
            else:
                (a, b), ln = e, lengths
            es.append(Edge((a, b), None if ln is None else as_fraction(ln)))
        return Tree(tuple(vertices), tuple(es), tuple(Leg(l, v) for l, v in legs))

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    @property
    def leg_labels(self) -> tuple[int, ...]:
        return tuple(sorted(l.label for l in self.legs))

    @property
    def is_concrete(self) -> bool:
        return all(e.length is not None for e in self.edges)

    def length_symbol(self, edge_index: int) -> str:
        return f"l_e{edge_index}"

    def leg(self, label: int) -> Leg:
        for l in self.legs:
            if l.label == label:
                return l
        _no_leg(label)

    def legs_at(self, v: VertexId) -> list[Leg]:
        return [l for l in self.legs if l.at == v]

    def adjacency(self) -> dict[VertexId, list[tuple[VertexId, int]]]:
        """vertex -> list of (neighbor, edge index)."""
        adj: dict[VertexId, list[tuple[VertexId, int]]] = {v: [] for v in self.vertices}
        for i, e in enumerate(self.edges):
            a, b = e.ends
            adj[a].append((b, i))
            adj[b].append((a, i))
        return adj

    def valence(self, v: VertexId) -> int:
        deg = sum(1 for e in self.edges if v in e.ends)
        return deg + len(self.legs_at(v))

    def with_lengths(self, lengths: list[Rat]) -> "Tree":
        if len(lengths) != len(self.edges):
            raise ParseError("wrong number of edge lengths")
        es = tuple(Edge(e.ends, as_fraction(x)) for e, x in zip(self.edges, lengths))
        return Tree(self.vertices, es, self.legs)


def _no_leg(label: int):
    from .errors import NoSuchLeg

    raise NoSuchLeg(f"no leg labeled {label}")


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_json(self) -> dict:
        return {"valid": self.ok, "problems": list(self.problems)}


def validate_tree(t: Tree) -> ValidationReport:
    """Collect every violated tree invariant; empty report iff valid."""
    problems: list[str] = []
    vs = set(t.vertices)
    if len(vs) != len(t.vertices):
        problems.append("duplicate vertex identifiers")
    if not t.vertices:
        problems.append("tree has no vertices")
        return ValidationReport(tuple(problems))

    for i, e in enumerate(t.edges):
        a, b = e.ends
        if a not in vs or b not in vs:
            problems.append(f"edge {i} has an endpoint not in the vertex set")
        if a == b:
            problems.append(f"edge {i} is a self-loop (cycle)")
        if e.length is not None:
            if e.length < 0:
                problems.append(f"edge {i} has negative length {fraction_str(e.length)}")
            elif e.length == 0:
                problems.append(f"edge {i} has length 0 (un-contracted degeneration)")
    for l in t.legs:
        if l.at not in vs:
            problems.append(f"leg {l.label} attached to unknown vertex {l.at!r}")

    labels = sorted(l.label for l in t.legs)
    expected = list(range(1, len(labels) + 1))
    if labels != expected:
        problems.append(f"leg labels {labels} are not exactly 1..{len(labels)}")

    # Union-find detects cycles; a final component count detects disconnection.
    parent = {v: v for v in vs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    cycle = False
    for e in t.edges:
        a, b = e.ends
        if a not in vs or b not in vs or a == b:
            continue
        ra, rb = find(a), find(b)
        if ra == rb:
            cycle = True
        else:
            parent[ra] = rb
    if cycle:
        problems.append("graph contains a cycle (genus > 0)")
    if len({find(v) for v in vs}) > 1:
        problems.append("graph is disconnected")
    return ValidationReport(tuple(problems))


# ---------------------------------------------------------------------------
# Canonical forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalForm:
    key: str
    tree: Tree  # all lengths symbolic, vertices renamed v0, v1, ...
    vertex_map: dict[VertexId, str] = field(compare=False)
    edge_map: tuple[int, ...] = ()  # original edge index -> canonical index


def canonicalize(t: Tree) -> CanonicalForm:
    """Deterministic canonical labeling of a tree shape.

    Rooted at the attachment vertex of the minimal leg label; subtrees are
    ordered by their recursive signature, so leg-label-preserving isomorphic
    trees get identical keys and canonical coordinate orders.
    """
    adj = t.adjacency()
    legs_at: dict[VertexId, list[int]] = {v: [] for v in t.vertices}
    for l in t.legs:
        legs_at[l.at].append(l.label)
    if t.legs:
        root = min(t.legs, key=lambda l: l.label).at
    else:
        root = t.vertices[0]

    sigs: dict[tuple[VertexId, VertexId | None], str] = {}

    def sig(v: VertexId, parent: VertexId | None) -> str:
        key = (v, parent)
        if key not in sigs:
            child_sigs = sorted(sig(w, v) for w, _ in adj[v] if w != parent)
            own = ",".join(str(x) for x in sorted(legs_at[v]))
            sigs[key] = f"({own};{''.join(child_sigs)})"
        return sigs[key]

    key = sig(root, None)

    vertex_map: dict[VertexId, str] = {}
    edge_map: dict[int, int] = {}

    def assign(v: VertexId, parent: VertexId | None) -> None:
        vertex_map[v] = f"v{len(vertex_map)}"
        children = sorted(
            ((w, i) for w, i in adj[v] if w != parent),
            key=lambda wi: sig(wi[0], v),
        )
        for w, i in children:
            edge_map[i] = len(edge_map)
            assign(w, v)

    assign(root, None)

    canon_edges: list[Edge | None] = [None] * len(t.edges)
    for orig, canon in edge_map.items():
        a, b = t.edges[orig].ends
        # Orient the canonical edge parent -> child.
        pa, pb = vertex_map[a], vertex_map[b]
        if int(pa[1:]) > int(pb[1:]):
            pa, pb = pb, pa
        canon_edges[canon] = Edge((pa, pb), None)
    canon_tree = Tree(
        tuple(f"v{i}" for i in range(len(t.vertices))),
        tuple(canon_edges),  # type: ignore[arg-type]
        tuple(sorted((Leg(l.label, vertex_map[l.at]) for l in t.legs), key=lambda x: x.label)),
    )
    return CanonicalForm(
        key=key,
        tree=canon_tree,
        vertex_map=vertex_map,
        edge_map=tuple(edge_map[i] for i in range(len(t.edges))),
    )


@dataclass(frozen=True)
class CombinatorialType:
    """A tree shape (all lengths symbolic) in canonical form."""

    tree: Tree
    key: str

    @staticmethod
    def of(t: Tree) -> "CombinatorialType":
        cf = canonicalize(t)
        return CombinatorialType(cf.tree, cf.key)

    def __eq__(self, other) -> bool:
        return isinstance(other, CombinatorialType) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def contract_edge(t: Tree, edge_index: int) -> Tree:
    """Contract one bounded edge, merging its endpoints.

    The surviving vertex is the first endpoint; legs re-attach and all
    other lengths are unchanged.
    """
    if not 0 <= edge_index < len(t.edges):
        raise NoSuchEdge(f"no edge with index {edge_index}")
    keep, drop = t.edges[edge_index].ends

    def repl(v: VertexId) -> VertexId:
        return keep if v == drop else v

    vertices = tuple(v for v in t.vertices if v != drop)
    edges = tuple(
        Edge((repl(e.ends[0]), repl(e.ends[1])), e.length)
        for i, e in enumerate(t.edges)
        if i != edge_index
    )
    legs = tuple(Leg(l.label, repl(l.at)) for l in t.legs)
    return Tree(vertices, edges, legs)


def _insert_leg(state, label):
    """All ways to add one labeled leg to a trivalent shape.

    ``state`` is (vertex count, edge list, leg list) over int vertex ids.
    Each insertion subdivides either a leg or an edge with a fresh vertex.
    """
    k, edges, legs = state
    out = []
    for j, (lbl, at) in enumerate(legs):
        new_legs = legs[:j] + [(lbl, k)] + legs[j + 1 :] + [(label, k)]
        out.append((k + 1, edges + [(at, k)], new_legs))
    for j, (a, b) in enumerate(edges):
        new_edges = edges[:j] + [(a, k), (k, b)] + edges[j + 1 :]
        out.append((k + 1, new_edges, legs + [(label, k)]))
    return out


def _trivalent_states(n: int):
    states = [(1, [], [(1, 0), (2, 0), (3, 0)])]
    for label in range(4, n + 1):
        states = [s2 for s in states for s2 in _insert_leg(s, label)]
    return states


def _state_to_tree(state) -> Tree:
    k, edges, legs = state
    return Tree.build(list(range(k)), edges, legs)


def enumerate_tree_types(
    n: int,
    stable_only: bool = True,
    trivalent_only: bool = False,
    max_vertices: int | None = None,
) -> list[CombinatorialType]:
    """Isomorphism classes of trees with n labeled legs, sorted by key.

    Stable means every vertex has valence (edges + legs) >= 3.  Trivalent
    stable shapes are generated by leg insertion; the remaining stable
    shapes arise from them by contracting internal edges.  The unstable
    enumeration requires an explicit vertex-count cap.
    """
    if stable_only:
        if n < 3:
            raise UnstableRange(f"stable trees need n >= 3 legs, got {n}")
        found: dict[str, CombinatorialType] = {}
        for state in _trivalent_states(n):
            ct = CombinatorialType.of(_state_to_tree(state))
            found[ct.key] = ct
        if not trivalent_only:
            frontier = list(found.values())
            while frontier:
                nxt = []
                for ct in frontier:
                    for i in range(len(ct.tree.edges)):
                        sub = CombinatorialType.of(contract_edge(ct.tree, i))
                        if sub.key not in found:
                            found[sub.key] = sub
                            nxt.append(sub)
                frontier = nxt
        return [found[k] for k in sorted(found)]

    if n < 1:
        raise UnstableRange(f"need n >= 1 legs, got {n}")
    if max_vertices is None:
        raise ValueError("unstable enumeration requires a vertex-count cap")
    found = {}
    for nv in range(1, max_vertices + 1):
        for edges in _labeled_trees(nv):
            for attach in itertools.product(range(nv), repeat=n):
                t = Tree.build(list(range(nv)), edges, [(i + 1, a) for i, a in enumerate(attach)])
                ct = CombinatorialType.of(t)
                found.setdefault(ct.key, ct)
    return [found[k] for k in sorted(found)]


def _labeled_trees(nv: int):
    """All labeled trees on nv vertices via Pruefer sequences."""
    if nv == 1:
        yield []
        return
    if nv == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(nv), repeat=nv - 2):
        degree = [1] * nv
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(nv) if degree[i] == 1)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        a, b = (i for i in range(nv) if degree[i] == 1)
        edges.append((a, b))
        yield edges


# ---------------------------------------------------------------------------
# JSON round-trip
# ---------------------------------------------------------------------------


def tree_to_json(t: Tree) -> dict:
    return {
        "vertices": list(t.vertices),
        "edges": [
            {"ends": list(e.ends), "length": None if e.length is None else fraction_str(e.length)}
            for e in t.edges
        ],
        "legs": [{"label": l.label, "at": l.at} for l in t.legs],
    }


def tree_from_json(doc: dict) -> Tree:
    try:
        vertices = tuple(doc["vertices"])
        edges = tuple(
            Edge(
                (e["ends"][0], e["ends"][1]),
                None if e.get("length") is None else as_fraction(e["length"]),
            )
            for e in doc["edges"]
        )
        legs = tuple(Leg(int(l["label"]), l["at"]) for l in doc["legs"])
    except (KeyError, IndexError, TypeError) as exc:
        raise ParseError(f"malformed tree document: missing/bad field {exc}") from exc
    return Tree(vertices, edges, legs)

"""Independent oracles and random generators used by the test suite.

Everything here deliberately avoids the library's own algorithms: slopes
come from solving the vertex balancing equations by Gaussian elimination,
trivalent counts from compatible-split enumeration, and feasibility from
grid search.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from troplog import ContactOrder, Tree


def solve_balancing_system(t: Tree, sigma: ContactOrder) -> list[Fraction] | None:
    """Unique slope assignment making the function balanced, by exact
    linear algebra on the per-vertex balancing equations.

    Unknown i is the slope along ``t.edges[i].ends`` read first-to-second.
    Returns None when the (overdetermined) system is inconsistent.
    """
    vs = list(t.vertices)
    ne = len(t.edges)
    labels = t.leg_labels
    rows = []
    for v in vs:
        row = [Fraction(0)] * (ne + 1)
        for i, e in enumerate(t.edges):
            if e.ends[0] == v:
                row[i] += 1
            if e.ends[1] == v:
                row[i] -= 1
        rhs = Fraction(0)
        for l in t.legs:
            if l.at == v:
                rhs -= sigma.slopes[labels.index(l.label)]
        row[ne] = rhs
        rows.append(row)

    # Gaussian elimination with exact rationals.
    rank = 0
    for col in range(ne):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / pr[col]
                rows[r] = [a - f * b for a, b in zip(rows[r], pr)]
        rank += 1
    for r in range(rank, len(rows)):
        if rows[r][ne] != 0:
            return None
    if rank < ne:
        return None  # not unique; cannot happen on a connected tree
    sol = [Fraction(0)] * ne
    rank = 0
    for col in range(ne):
        row = next((r for r in rows if r[col] != 0 and all(r[c] == 0 for c in range(col))), None)
        if row is not None:
            sol[col] = row[ne] / row[col]
    return sol


def count_trivalent_by_splits(n: int) -> int:
    """Number of trivalent n-leg trees = number of (n-3)-element pairwise
    compatible families of proper splits, enumerated exhaustively."""
    ground = list(range(2, n + 1))
    splits = []
    for size in range(2, n - 1):
        for combo in itertools.combinations(ground, size):
            mask = 0
            for x in combo:
                mask |= 1 << x
            splits.append(mask)

    def compatible(a: int, b: int) -> bool:
        return (a & b) == 0 or (a & b) == a or (a & b) == b

    if n == 3:
        return 1
    count = 0
    for family in itertools.combinations(splits, n - 3):
        if all(compatible(a, b) for a, b in itertools.combinations(family, 2)):
            count += 1
    return count


def count_stable_by_splits(n: int) -> int:
    """Number of stable n-leg trees = number of pairwise compatible split
    families of any size (including the empty family)."""
    ground = list(range(2, n + 1))
    splits = []
    for size in range(2, n - 1):
        for combo in itertools.combinations(ground, size):
            mask = 0
            for x in combo:
                mask |= 1 << x
            splits.append(mask)

    def compatible(a, b):
        return (a & b) == 0 or (a & b) == a or (a & b) == b

    count = 0
    for size in range(0, n - 2):
        for family in itertools.combinations(splits, size):
            if all(compatible(a, b) for a, b in itertools.combinations(family, 2)):
                count += 1
    return count


def random_tree(rng: random.Random, n: int, max_internal: int = 10, concrete: bool = True) -> Tree:
    """Random connected tree with n labeled legs."""
    nv = rng.randint(1, max(1, min(max_internal + 1, 2 * n)))
    edges = []
    for v in range(1, nv):
        u = rng.randrange(v)
        length = Fraction(rng.randint(1, 12), rng.randint(1, 4)) if concrete else None
        edges.append((u, v, length))
    legs = [(i + 1, rng.randrange(nv)) for i in range(n)]
    return Tree.build(list(range(nv)), edges, legs)


def random_zero_sum(rng: random.Random, n: int, bound: int = 9) -> ContactOrder:
    vals = [rng.randint(-bound, bound) for _ in range(n - 1)]
    return ContactOrder.of(vals + [-sum(vals)])


def random_stable_tree(rng: random.Random, n: int, concrete: bool = True) -> Tree:
    """Random stable tree sampled by random leg insertion, then random
    contraction of some internal edges."""
    from troplog import contract_edge

    state_vertices = [0]
    edges: list[tuple[int, int]] = []
    legs = [(1, 0), (2, 0), (3, 0)]
    for label in range(4, n + 1):
        k = len(state_vertices)
        spots = len(legs) + len(edges)
        pick = rng.randrange(spots)
        if pick < len(legs):
            lbl, at = legs[pick]
            legs[pick] = (lbl, k)
            edges.append((at, k))
            legs.append((label, k))
        else:
            a, b = edges[pick - len(legs)]
            edges[pick - len(legs)] = (a, k)
            edges.append((k, b))
            legs.append((label, k))
        state_vertices.append(k)
    t = Tree.build(state_vertices, edges, legs)
    for _ in range(rng.randint(0, len(t.edges))):
        if not t.edges:
            break
        if rng.random() < 0.5:
            t = contract_edge(t, rng.randrange(len(t.edges)))
    if concrete:
        t = t.with_lengths([Fraction(rng.randint(1, 9)) for _ in t.edges])
    return t


def grid_points(variables: list[str], bound: int = 3):
    """All points with half-integer coordinates in [-bound, bound]."""
    ticks = [Fraction(i, 2) for i in range(-2 * bound, 2 * bound + 1)]
    for combo in itertools.product(ticks, repeat=len(variables)):
        yield dict(zip(variables, combo))

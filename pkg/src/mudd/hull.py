"""Exact incremental convex hull over rational points.

Triangulated beneath-beyond: facets are stored as simplices; a point is
inserted by deleting the facets its position strictly violates and coning it
over the horizon ridges. With exact Fractions a point outside the current
hull always strictly violates some facet, and every new facet simplex is
non-degenerate, so no perturbation is needed. Coplanar simplices are merged
at the end by deduplicating normalized supporting hyperplanes.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DegenerateHull

Point = tuple[Fraction, ...]
Hyperplane = tuple[tuple[Fraction, ...], Fraction]  # (a, b) with a.x <= b inside


def _sub(p: Point, q: Point) -> tuple[Fraction, ...]:
    return tuple(x - y for x, y in zip(p, q))


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _rank_append(basis: list[list[Fraction]], vec: Sequence[Fraction]) -> bool:
    """Gaussian step: try to add vec to an eliminated basis; True if rank grew."""
    v = list(vec)
    for row in basis:
        lead = next(i for i, x in enumerate(row) if x != 0)
        if v[lead] != 0:
            factor = v[lead] / row[lead]
            for i in range(len(v)):
                v[i] -= factor * row[i]
    if any(x != 0 for x in v):
        basis.append(v)
        return True
    return False


def _nullvector(vectors: list[tuple[Fraction, ...]], dim: int) -> tuple[Fraction, ...]:
    """A nonzero vector orthogonal to d-1 independent vectors in dimension d."""
    # reduced row echelon form, then read the single free column
    rows = [list(v) for v in vectors]
    pivots: list[int] = []
    r = 0
    for c in range(dim):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(dim) if c not in pivots]
    if len(free) != 1:
        raise DegenerateHull("facet vertices are not affinely independent")
    f = free[0]
    vec = [Fraction(0)] * dim
    vec[f] = Fraction(1)
    for i, c in enumerate(pivots):
        vec[c] = -rows[i][f]
    return tuple(vec)


class _Facet:
    __slots__ = ("vertices", "normal", "offset")

    def __init__(self, vertices: tuple[int, ...], normal: tuple[Fraction, ...], offset: Fraction):
        self.vertices = vertices
        self.normal = normal
        self.offset = offset


def convex_hull_hyperplanes(points: Sequence[Point]) -> list[Hyperplane]:
    """Supporting hyperplanes of the hull facets, one per geometric facet.

    Points must affinely span their space. Each returned (a, b) satisfies
    a.x <= b for every input point, with equality on the facet; vectors are
    scaled to primitive integers.
    """
    pts = list(dict.fromkeys(tuple(Fraction(x) for x in p) for p in points))
    if not pts:
        raise DegenerateHull("no points")
    dim = len(pts[0])
    if dim < 2:
        raise DegenerateHull("hull requires dimension >= 2")

    # greedy affinely independent seed simplex
    seed = [0]
    basis: list[list[Fraction]] = []
    for i in range(1, len(pts)):
        if _rank_append(basis, _sub(pts[i], pts[0])):
            seed.append(i)
        if len(seed) == dim + 1:
            break
    if len(seed) != dim + 1:
        raise DegenerateHull("points do not span the space")

    interior = tuple(sum(pts[i][c] for i in seed) / (dim + 1) for c in range(dim))

    def make_facet(vertex_ids: tuple[int, ...]) -> _Facet:
        base = pts[vertex_ids[0]]
        vectors = [_sub(pts[v], base) for v in vertex_ids[1:]]
        normal = _nullvector(vectors, dim)
        offset = _dot(normal, base)
        side = _dot(normal, interior)
        if side == offset:
            raise DegenerateHull("interior point lies on a facet hyperplane")
        if side > offset:
            normal = tuple(-x for x in normal)
            offset = -offset
        return _Facet(tuple(sorted(vertex_ids)), normal, offset)

    facets: dict[int, _Facet] = {}
    next_id = 0
    ridge_map: dict[frozenset[int], list[int]] = {}

    def add_facet(f: _Facet) -> None:
        nonlocal next_id
        fid = next_id
        next_id += 1
        facets[fid] = f
        for ridge in _ridges(f.vertices):
            ridge_map.setdefault(ridge, []).append(fid)

    def remove_facet(fid: int) -> None:
        f = facets.pop(fid)
        for ridge in _ridges(f.vertices):
            incident = ridge_map[ridge]
            incident.remove(fid)
            if not incident:
                del ridge_map[ridge]

    def _ridges(vertices: tuple[int, ...]):
        for skip in range(len(vertices)):
            yield frozenset(vertices[:skip] + vertices[skip + 1 :])

    for skip in range(dim + 1):
        add_facet(make_facet(tuple(seed[:skip] + seed[skip + 1 :])))

    in_seed = set(seed)
    for idx in range(len(pts)):
        if idx in in_seed:
            continue
        p = pts[idx]
        visible = [fid for fid, f in facets.items() if _dot(f.normal, p) > f.offset]
        if not visible:
            continue
        visible_set = set(visible)
        horizon: list[frozenset[int]] = []
        for fid in visible:
            for ridge in _ridges(facets[fid].vertices):
                incident = ridge_map[ridge]
                if any(other not in visible_set for other in incident):
                    horizon.append(ridge)
        for fid in visible:
            remove_facet(fid)
        for ridge in horizon:
            add_facet(make_facet(tuple(ridge) + (idx,)))

    unique: dict[tuple, Hyperplane] = {}
    for f in facets.values():
        a, b = _primitive(f.normal, f.offset)
        unique[(a, b)] = (a, b)
    return list(unique.values())


def _primitive(normal: Sequence[Fraction], offset: Fraction) -> Hyperplane:
    """Scale (a, b) by a positive rational to primitive integer form."""
    denom = 1
    for x in list(normal) + [offset]:
        denom = denom * x.denominator // _gcd_int(denom, x.denominator)
    ints = [int(x * denom) for x in normal]
    b = int(offset * denom)
    g = 0
    for x in ints + [b]:
        g = _gcd_int(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
        b = b // g
    return tuple(Fraction(x) for x in ints), Fraction(b)


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a

"""Model cones and explicit constraint deduction.

The cone of a diagram is generated by its path counter signatures. Its facet
description is deduced in four steps: signatures are scaled to primitive
integer vectors and deduplicated; Gaussian elimination yields the equality
constraints and a full-rank coordinate projection; generators interior to the
cone are removed by membership LPs; the remaining extreme rays are hulled
(with the origin) to enumerate facet inequalities. All arithmetic is exact:
signatures are small integers and rationals keep them that way, where
floating point rounding could flip a facet.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from . import hull, linprog
from .errors import DegenerateHull, DimensionMismatch
from .model import (
    DEFAULT_PATH_CAP,
    CounterNamespace,
    CounterSignature,
    MuDD,
    signatures_of_model,
)

Vector = tuple[int, ...]


def _as_vector(sig) -> Vector:
    counts = sig.counts if isinstance(sig, CounterSignature) else sig
    out = []
    for c in counts:
        if c != int(c):
            raise ValueError(f"signature entries must be integers, got {c!r}")
        out.append(int(c))
    return tuple(out)


def _primitive(v: Sequence[int]) -> Vector:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g > 1:
        return tuple(x // g for x in v)
    return tuple(v)


@dataclass(frozen=True)
class Constraint:
    """One half-space (a.v >= 0) or hyperplane (a.v = 0) with integer coefficients."""

    kind: str  # "equality" | "inequality"
    coefficients: Vector
    provenance: str = ""

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != len(self.coefficients):
            raise DimensionMismatch(
                f"point has {len(point)} coordinates, constraint has {len(self.coefficients)}"
            )
        return sum((Fraction(p) * c for p, c in zip(point, self.coefficients)), Fraction(0))

    def satisfied_by(self, point: Sequence) -> bool:
        value = self.evaluate(point)
        return value == 0 if self.kind == "equality" else value >= 0

    def display(self, ns: CounterNamespace) -> str:
        """Render with negative coefficients moved across the relation.

        Inequalities a.v >= 0 read `negative side <= positive side`; equalities
        read `positive side = negative side`, e.g. a sum decomposition.
        """
        pos = [(c, ns.names[i]) for i, c in enumerate(self.coefficients) if c > 0]
        neg = [(-c, ns.names[i]) for i, c in enumerate(self.coefficients) if c < 0]

        def side(terms):
            if not terms:
                return "0"
            return " + ".join(f"{c}*{n}" if c != 1 else n for c, n in terms)

        if self.kind == "equality":
            return f"{side(pos)} = {side(neg)}"
        return f"{side(neg)} ≤ {side(pos)}"


@dataclass(frozen=True)
class ConstraintSet:
    equalities: tuple[Constraint, ...]
    inequalities: tuple[Constraint, ...]
    namespace: CounterNamespace

    def __iter__(self):
        yield from self.equalities
        yield from self.inequalities

    def satisfied_by(self, point: Sequence) -> bool:
        return all(c.satisfied_by(point) for c in self)

    def to_json(self) -> list[dict]:
        out = []
        for c in self:
            out.append(
                {
                    "kind": c.kind,
                    "coefficients": {
                        self.namespace.names[i]: coeff
                        for i, coeff in enumerate(c.coefficients)
                        if coeff != 0
                    },
                    "display": c.display(self.namespace),
                    "provenance": c.provenance,
                }
            )
        return out


@dataclass(frozen=True)
class ProjectionMap:
    """Bookkeeping for the quotient projection onto the generator span.

    Selecting the pivot coordinates of the reduced row echelon form is a
    linear isomorphism of the span, so facets found in reduced coordinates
    lift back by scattering coefficients into the pivot positions.
    """

    pivot_columns: tuple[int, ...]
    dimension: int

    def project(self, v: Sequence[int]) -> Vector:
        return tuple(v[c] for c in self.pivot_columns)

    def lift(self, coeffs: Sequence[int]) -> Vector:
        full = [0] * self.dimension
        for c, coeff in zip(self.pivot_columns, coeffs):
            full[c] = coeff
        return tuple(full)


@dataclass(frozen=True)
class ModelCone:
    """Deduplicated primitive generators of a diagram's counter cone."""

    generators: tuple[Vector, ...]
    dimension: int
    namespace: CounterNamespace

    @classmethod
    def from_signatures(
        cls, sigs: Iterable, namespace: CounterNamespace
    ) -> "ModelCone":
        gens = tuple(s.counts for s in normalize_signatures(sigs))
        return cls(generators=gens, dimension=len(namespace), namespace=namespace)

    @classmethod
    def from_model(cls, model: MuDD, cap: int = DEFAULT_PATH_CAP) -> "ModelCone":
        return cls.from_signatures(signatures_of_model(model, cap), model.namespace)

    def contains(self, point: Sequence) -> bool:
        return cone_membership(self.generators, point)


def normalize_signatures(sigs: Iterable) -> tuple[CounterSignature, ...]:
    """Primitive, deduplicated, lexicographically sorted generators.

    Each nonzero signature is divided by the gcd of its entries; zero
    signatures contribute nothing to the cone and are dropped.
    """
    seen: set[Vector] = set()
    for sig in sigs:
        v = _as_vector(sig)
        if any(v):
            seen.add(_primitive(v))
    return tuple(CounterSignature(counts=v) for v in sorted(seen))


# ---------------------------------------------------------------------------
# step 2: equalities by exact Gaussian elimination


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
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
    return rows[:r], pivots


def _integerize(v: Sequence[Fraction]) -> Vector:
    denom = 1
    for x in v:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in v]
    prim = _primitive(ints)
    for x in prim:
        if x != 0:
            return prim if x > 0 else tuple(-y for y in prim)
    return prim


def find_equalities(
    gens: Sequence, dim: Optional[int] = None
) -> tuple[tuple[Constraint, ...], tuple[Vector, ...], ProjectionMap]:
    """Equality constraints plus generators re-expressed in full-rank coordinates.

    The equalities are an integer basis of the orthogonal complement of the
    generator span (the null space of the generator matrix); an empty
    generator set therefore yields v_i = 0 for every coordinate (pass dim
    explicitly in that case).
    """
    vectors = [_as_vector(g) for g in gens]
    if dim is None:
        if not vectors:
            raise ValueError("dimension is required for an empty generator set")
        dim = len(vectors[0])
    for v in vectors:
        if len(v) != dim:
            raise DimensionMismatch("generator length does not match dimension")
    rref, pivots = _rref([[Fraction(x) for x in v] for v in vectors], dim)
    free = [c for c in range(dim) if c not in pivots]
    equalities = []
    for f in free:
        coeffs = [Fraction(0)] * dim
        coeffs[f] = Fraction(1)
        for i, c in enumerate(pivots):
            coeffs[c] = -rref[i][f]
        # null-space basis vector: orthogonal to every generator
        equalities.append(
            Constraint(kind="equality", coefficients=_integerize(coeffs),
                       provenance="gaussian-elimination")
        )
    projection = ProjectionMap(pivot_columns=tuple(pivots), dimension=dim)
    reduced = tuple(dict.fromkeys(projection.project(v) for v in vectors))
    return tuple(equalities), reduced, projection


# ---------------------------------------------------------------------------
# step 3: interior generator removal


def _in_cone(gens: Sequence[Vector], point: Sequence[Fraction]) -> bool:
    dim = len(point)
    if not gens:
        return all(x == 0 for x in point)
    A = [[Fraction(g[i]) for g in gens] for i in range(dim)]
    return linprog.solve_equality_form(A, list(point), len(gens)) is not None


def cone_membership(gens: Sequence, point: Sequence) -> bool:
    """True iff point is a non-negative combination of the generators (exact LP)."""
    vectors = [_as_vector(g) for g in gens]
    p = [Fraction(x) for x in point]
    for v in vectors:
        if len(v) != len(p):
            raise DimensionMismatch(
                f"generator dimension {len(v)} does not match point dimension {len(p)}"
            )
    return _in_cone(vectors, p)


def remove_interior_generators(gens: Sequence) -> tuple[Vector, ...]:
    """Drop every generator expressible as a non-negative combination of the rest.

    After deduplication the survivors are exactly the extreme rays, so the
    cone is unchanged; order of removal does not matter for pointed cones.
    """
    vectors = list(dict.fromkeys(_as_vector(g) for g in gens))
    keep = list(vectors)
    i = 0
    while i < len(keep):
        others = keep[:i] + keep[i + 1 :]
        if others and _in_cone(others, [Fraction(x) for x in keep[i]]):
            keep.pop(i)
        else:
            i += 1
    return tuple(keep)


# ---------------------------------------------------------------------------
# step 4: facet enumeration through the conic hull


def conic_hull_facets(
    gens: Sequence, projection: Optional[ProjectionMap] = None
) -> tuple[Constraint, ...]:
    """Facet inequalities a.v >= 0 of the cone spanned by full-rank generators.

    Low dimensions avoid the general hull: one dimension has the single facet
    v >= 0 along the ray, two dimensions the two boundary rays. Higher
    dimensions hull {0} union the generators (rescaled onto a common
    cross-section, which leaves the cone unchanged) and keep the facets
    through the origin. Facets are lifted back to original coordinates when a
    projection is given.
    """
    vectors = list(dict.fromkeys(_as_vector(g) for g in gens))
    if not vectors:
        return ()
    dim = len(vectors[0])

    raw: list[Vector] = []
    if dim == 1:
        if any(v[0] < 0 for v in vectors):
            raise DegenerateHull("signature generators must be non-negative")
        raw.append((1,))
    elif dim == 2:
        # candidate facet normal for each boundary ray; valid if one-sided
        for vx, vy in vectors:
            for cand in ((-vy, vx), (vy, -vx)):
                if all(cand[0] * gx + cand[1] * gy >= 0 for gx, gy in vectors):
                    raw.append(_primitive(cand))
    else:
        scaled = []
        for v in vectors:
            total = sum(v)
            if total <= 0:
                raise DegenerateHull("signature generators must be non-negative and nonzero")
            scaled.append(tuple(Fraction(x, total) for x in v))
        origin = tuple(Fraction(0) for _ in range(dim))
        for normal, offset in hull.convex_hull_hyperplanes([origin] + scaled):
            if offset != 0:
                continue
            coeffs = tuple(-int(x) for x in normal)  # inside is a.x <= 0
            raw.append(_primitive(coeffs))

    facets: set[Vector] = set()
    for coeffs in raw:
        values = [sum(c * g for c, g in zip(coeffs, v)) for v in vectors]
        if all(x >= 0 for x in values):
            oriented = coeffs
        elif all(x <= 0 for x in values):
            oriented = tuple(-c for c in coeffs)
        else:
            raise DegenerateHull(f"facet {coeffs} could not be oriented")
        facets.add(oriented)

    lifted = sorted(
        projection.lift(f) if projection is not None else f for f in facets
    )
    return tuple(
        Constraint(kind="inequality", coefficients=f, provenance="conic-hull")
        for f in lifted
    )


# ---------------------------------------------------------------------------
# composition


def _support_blocks(gens: Sequence[Vector], dim: int) -> list[tuple[int, ...]]:
    """Partition coordinates into connected components of generator supports."""
    parent = list(range(dim))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        support = [i for i, x in enumerate(g) if x]
        for a, b in zip(support, support[1:]):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    blocks: dict[int, list[int]] = {}
    for c in range(dim):
        blocks.setdefault(find(c), []).append(c)
    return [tuple(v) for _, v in sorted(blocks.items(), key=lambda kv: kv[1][0])]


def constraints_from_signatures(
    sigs: Iterable, namespace: CounterNamespace
) -> ConstraintSet:
    """Run the four deduction steps on raw signatures.

    Counters that never co-occur in a generator split the cone into a direct
    sum; its facets are exactly the per-block facets padded with zeros, so
    interior removal and the hull run per block. This leaves the output
    unchanged and keeps decoupled models cheap.
    """
    gens = [s.counts for s in normalize_signatures(sigs)]
    dim = len(namespace)
    equalities, reduced, projection = find_equalities(gens, dim)
    inequalities: list[Constraint] = []
    if reduced:
        rdim = len(reduced[0])
        for block in _support_blocks(reduced, rdim):
            block_gens = [
                tuple(g[c] for c in block)
                for g in reduced
                if any(g[c] for c in block)
            ]
            extreme = remove_interior_generators(block_gens)
            for facet in conic_hull_facets(extreme):
                in_reduced = [0] * rdim
                for c, coeff in zip(block, facet.coefficients):
                    in_reduced[c] = coeff
                inequalities.append(
                    Constraint(
                        kind="inequality",
                        coefficients=projection.lift(in_reduced),
                        provenance="conic-hull",
                    )
                )
    inequalities.sort(key=lambda c: c.coefficients)
    return ConstraintSet(
        equalities=equalities, inequalities=tuple(inequalities), namespace=namespace
    )


def deduce_constraints(model: MuDD, cap: int = DEFAULT_PATH_CAP) -> ConstraintSet:
    """Explicit constraint set of a diagram's model cone."""
    return constraints_from_signatures(signatures_of_model(model, cap), model.namespace)

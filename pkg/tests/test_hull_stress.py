"""Randomized cross-checks of the exact hull and simplex cores.

The hull is compared against the subset-enumeration facet oracle on cone
families chosen to be degenerate (0/1 generators, orthant mixtures); the
simplex is fed systems whose verdicts carry certificates (a non-negative
solution, or a dual vector in the infeasibility direction).
"""
import random
from fractions import Fraction

from mudd.geometry import (
    conic_hull_facets,
    find_equalities,
    normalize_signatures,
    remove_interior_generators,
)
from mudd.linprog import solve_equality_form

from conftest import brute_force_facets


def test_hull_matches_oracle_on_degenerate_cones():
    rng = random.Random(424242)
    tested = 0
    while tested < 250:
        dim = rng.randint(2, 5)
        style = rng.random()
        n = rng.randint(dim, dim + 4)
        if style < 0.3:  # 0/1 vectors: coplanar-rich
            gens = [tuple(rng.randint(0, 1) for _ in range(dim)) for _ in range(n)]
        elif style < 0.6:
            gens = [tuple(rng.randint(0, 3) for _ in range(dim)) for _ in range(n)]
        else:  # orthant plus extras
            gens = [tuple(1 if i == k else 0 for i in range(dim)) for k in range(dim)]
            gens += [tuple(rng.randint(0, 2) for _ in range(dim)) for _ in range(n - dim)]
        norm = [s.counts for s in normalize_signatures(gens)]
        if not norm:
            continue
        _, reduced, _ = find_equalities(norm, dim)
        if len(reduced[0]) != dim:
            continue  # the oracle is written for full-rank ambient spaces
        tested += 1
        extreme = remove_interior_generators(norm)
        got = {c.coefficients for c in conic_hull_facets(extreme)}
        assert got == brute_force_facets(list(extreme), dim), extreme


def test_simplex_verdicts_are_certified():
    rng = random.Random(777)
    for trial in range(300):
        m = rng.randint(1, 5)
        n = rng.randint(1, 7)
        if trial % 2 == 0:
            # feasible by construction: b = A @ x* with x* >= 0
            A = [[Fraction(rng.randint(-4, 4)) for _ in range(n)] for _ in range(m)]
            xstar = [Fraction(rng.randint(0, 5), rng.randint(1, 3)) for _ in range(n)]
            b = [sum(A[i][j] * xstar[j] for j in range(n)) for i in range(m)]
            x = solve_equality_form(A, b, n)
            assert x is not None
            for i in range(m):
                assert sum(A[i][j] * x[j] for j in range(n)) == b[i]
            assert all(v >= 0 for v in x)
        else:
            # infeasible by a Farkas certificate: y with yA <= 0 and yb > 0
            y = [Fraction(rng.randint(-3, 3)) for _ in range(m)]
            if all(v == 0 for v in y):
                y[0] = Fraction(1)
            A = [[Fraction(0)] * n for _ in range(m)]
            for j in range(n):
                col = [Fraction(rng.randint(-4, 4)) for _ in range(m)]
                if sum(y[i] * col[i] for i in range(m)) > 0:
                    col = [-c for c in col]
                for i in range(m):
                    A[i][j] = col[i]
            b = [Fraction(rng.randint(-4, 4)) for _ in range(m)]
            dot = sum(y[i] * b[i] for i in range(m))
            if dot == 0:
                k = next(i for i in range(m) if y[i] != 0)
                b[k] += Fraction(1, 2) / y[k]
                dot = sum(y[i] * b[i] for i in range(m))
            if dot < 0:
                b = [-v for v in b]
            assert solve_equality_form(A, b, n) is None

"""Exact linear-program feasibility via phase-one simplex.

Pure feasibility (no objective): minimize the sum of artificial variables
with Bland's rule on both the entering and leaving choice, which precludes
cycling, so termination is unconditional. Rows are kept as integer vectors
with one positive denominator each; pivoting uses cross-multiplication and
one row-level gcd, so verdicts are exact without per-entry rational
normalization overhead.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence


def _to_fraction_rows(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def _integer_row(row: Sequence[Fraction], rhs: Fraction) -> list[int]:
    """Scale a rational row (and rhs, appended last) to integers."""
    denom = 1
    for x in row:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    denom = denom * rhs.denominator // gcd(denom, rhs.denominator)
    out = [int(x * denom) for x in row]
    out.append(int(rhs * denom))
    return out


def _normalize_row(row: list[int]) -> int:
    """Divide a row by its gcd; returns the divisor (1 if already primitive)."""
    g = 0
    for x in row:
        if x:
            g = gcd(g, x if x > 0 else -x)
            if g == 1:
                return 1
    if g > 1:
        for j in range(len(row)):
            row[j] //= g
    return g if g else 1


def solve_equality_form(
    A: Sequence[Sequence],
    b: Sequence,
    num_vars: int,
    basis_hint: Optional[Sequence[Optional[int]]] = None,
) -> Optional[list[Fraction]]:
    """Find x >= 0 with A x = b, or None if none exists.

    basis_hint[i] may name a column usable as the initial basic variable of
    row i (a unit column such as a slack); rows without a usable hint get an
    artificial variable.
    """
    A = _to_fraction_rows(A)
    b = [Fraction(x) for x in b]
    m = len(A)
    if m != len(b):
        raise ValueError("A and b row counts differ")
    for row in A:
        if len(row) != num_vars:
            raise ValueError("row length does not match num_vars")

    rows: list[list[int]] = []
    for i in range(m):
        row = _integer_row(A[i], b[i])
        if row[-1] < 0:
            row = [-x for x in row]
        _normalize_row(row)
        rows.append(row)

    # choose initial basis: hinted unit columns where valid, else artificials
    basis: list[int] = [-1] * m
    art_rows: list[int] = []
    for i in range(m):
        hint = basis_hint[i] if basis_hint is not None else None
        if hint is not None and rows[i][hint] > 0:
            ok = all(rows[k][hint] == 0 for k in range(m) if k != i)
            if ok:
                basis[i] = hint
                continue
        art_rows.append(i)

    n_art = len(art_rows)
    total = num_vars + n_art
    denoms: list[int] = []
    for i in range(m):
        rhs = rows[i].pop()
        rows[i].extend([0] * n_art)
        rows[i].append(rhs)
        denoms.append(1)
    for k, i in enumerate(art_rows):
        rows[i][num_vars + k] = 1
        basis[i] = num_vars + k

    # reduced costs for min(sum of artificials); artificial rows have unit
    # basic entries so the initial cost row is integral with denominator 1
    cost = [0] * (total + 1)
    for k in range(n_art):
        cost[num_vars + k] = 1
    for i in art_rows:
        row = rows[i]
        for j in range(total + 1):
            if row[j]:
                cost[j] -= row[j]
    cost_denom = 1

    rhs_col = total
    while True:
        entering = -1
        for j in range(total):
            if cost[j] < 0:
                entering = j
                break
        if entering < 0:
            break
        leaving = -1
        best_num = best_den = 0  # best ratio = best_num / best_den, best_den > 0
        for i in range(m):
            a = rows[i][entering]
            if a > 0:
                r = rows[i][rhs_col]
                if leaving < 0:
                    better = True
                else:
                    lhs = r * best_den
                    rhs = best_num * a
                    better = lhs < rhs or (lhs == rhs and basis[i] < basis[leaving])
                if better:
                    best_num, best_den = r, a
                    leaving = i
        if leaving < 0:
            raise ArithmeticError("phase-one simplex became unbounded")

        piv_row = rows[leaving]
        piv = piv_row[entering]
        for i in range(m):
            if i == leaving:
                continue
            f = rows[i][entering]
            if f:
                row = [x * piv - f * y for x, y in zip(rows[i], piv_row)]
                rows[i] = row
                denoms[i] *= piv
                denoms[i] //= _normalize_row_with_denom(row, denoms[i])
        f = cost[entering]
        if f:
            cost = [x * piv - f * y for x, y in zip(cost, piv_row)]
            cost_denom *= piv
            cost_denom //= _normalize_row_with_denom(cost, cost_denom)
        denoms[leaving] = piv
        denoms[leaving] //= _normalize_row_with_denom(piv_row, piv)
        basis[leaving] = entering

    if cost[rhs_col] != 0:
        return None
    x = [Fraction(0)] * num_vars
    for i in range(m):
        col = basis[i]
        if col < num_vars:
            x[col] = Fraction(rows[i][rhs_col], rows[i][col])
    return x


def _normalize_row_with_denom(row: list[int], denom: int) -> int:
    """gcd-normalize a row together with its denominator; returns the divisor."""
    g = denom
    for x in row:
        if x:
            g = gcd(g, x if x > 0 else -x)
            if g == 1:
                return 1
    if g > 1:
        for j in range(len(row)):
            row[j] //= g
        return g
    return 1


def feasible_point(
    num_vars: int,
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
) -> Optional[list[Fraction]]:
    """Find x >= 0 with A_eq x = b_eq and A_ub x <= b_ub (slacks added here).

    Returns the structural variables only, or None if the system is
    infeasible. Slack columns of inequality rows with non-negative bounds
    seed the initial basis, so artificials are only created where needed.
    """
    A_eq = _to_fraction_rows(A_eq)
    A_ub = _to_fraction_rows(A_ub)
    b_eq = [Fraction(x) for x in b_eq]
    b_ub = [Fraction(x) for x in b_ub]
    n_slack = len(A_ub)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    hints: list[Optional[int]] = []
    for row, r in zip(A_eq, b_eq):
        rows.append(list(row) + [Fraction(0)] * n_slack)
        rhs.append(r)
        hints.append(None)
    for k, (row, r) in enumerate(zip(A_ub, b_ub)):
        slack = [Fraction(0)] * n_slack
        slack[k] = Fraction(1)
        rows.append(list(row) + slack)
        rhs.append(r)
        hints.append(num_vars + k)
    solution = solve_equality_form(rows, rhs, num_vars + n_slack, basis_hint=hints)
    if solution is None:
        return None
    return solution[:num_vars]

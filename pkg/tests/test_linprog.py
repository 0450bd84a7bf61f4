from fractions import Fraction

import pytest

from mudd.linprog import feasible_point, solve_equality_form


def test_simple_equality_system():
    # x1 + x2 = 2, x1 - x2 = 0 -> x = (1, 1)
    x = solve_equality_form([[1, 1], [1, -1]], [2, 0], 2)
    assert x == [Fraction(1), Fraction(1)]


def test_infeasible_equality_system():
    # x1 + x2 = -1 has no non-negative solution
    assert solve_equality_form([[1, 1]], [-1], 2) is None


def test_underdetermined_picks_some_solution():
    x = solve_equality_form([[1, 1, 1]], [3], 3)
    assert x is not None
    assert sum(x) == 3
    assert all(v >= 0 for v in x)


def test_redundant_rows_ok():
    x = solve_equality_form([[1, 1], [2, 2]], [2, 4], 2)
    assert x is not None
    assert x[0] + x[1] == 2


def test_inconsistent_redundant_rows():
    assert solve_equality_form([[1, 1], [1, 1]], [2, 3], 2) is None


def test_rational_coefficients():
    x = solve_equality_form([[Fraction(1, 3), Fraction(1, 2)]], [Fraction(5, 6)], 2)
    assert x is not None
    assert Fraction(1, 3) * x[0] + Fraction(1, 2) * x[1] == Fraction(5, 6)


def test_feasible_point_with_inequalities():
    # x <= 2, -x <= -1 (x >= 1)
    x = feasible_point(1, A_ub=[[1], [-1]], b_ub=[2, -1])
    assert x is not None
    assert 1 <= x[0] <= 2


def test_feasible_point_infeasible_box():
    assert feasible_point(1, A_ub=[[1], [-1]], b_ub=[1, -2]) is None


def test_mixed_system():
    # x + y = 4 with x <= 1 forces y >= 3
    x = feasible_point(2, A_eq=[[1, 1]], b_eq=[4], A_ub=[[1, 0]], b_ub=[1])
    assert x is not None
    assert x[0] + x[1] == 4
    assert x[0] <= 1


def test_degenerate_ties_terminate():
    # highly degenerate rows exercise Bland's rule tie-breaking
    rows = [
        [1, 1, 0, 0],
        [0, 1, 1, 0],
        [1, 0, 1, 0],
        [1, 1, 1, 1],
    ]
    x = solve_equality_form(rows, [0, 0, 0, 0], 4)
    assert x == [Fraction(0)] * 4


def test_float_bounds_are_exact_rationals():
    # 0.1 as a float is not 1/10; the solver must honor the exact binary value
    x = feasible_point(1, A_ub=[[1], [-1]], b_ub=[0.1, -0.1])
    assert x is not None
    assert x[0] == Fraction(0.1)


def test_shape_errors():
    with pytest.raises(ValueError):
        solve_equality_form([[1, 2]], [1, 2], 2)
    with pytest.raises(ValueError):
        solve_equality_form([[1, 2, 3]], [1], 2)

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from tractorlab.exact import (RatMatrix, as_rational, fstr, in_column_space, nullity, nullspace,
                              pivot_columns, primitive_integer, rank, solve)

small_q = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def sparse_matrices(draw, max_rows=7, max_cols=7):
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    density = draw(st.sampled_from([0.2, 0.5, 1.0]))
    cells = draw(st.lists(st.tuples(st.booleans(), small_q), min_size=m * n, max_size=m * n))
    rows = [[q if keep or density == 1.0 else 0 for keep, q in cells[i * n:(i + 1) * n]] for i in range(m)]
    return rows


def _sympy(rows):
    return sp.Matrix([[sp.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else x for x in r]
                      for r in rows])


@settings(max_examples=150, deadline=None)
@given(sparse_matrices())
def test_rank_agrees_with_sympy(rows):
    assert rank(RatMatrix.from_dense(rows)) == _sympy(rows).rank()


@settings(max_examples=150, deadline=None)
@given(sparse_matrices())
def test_nullspace_is_a_kernel_basis(rows):
    A = RatMatrix.from_dense(rows)
    basis = nullspace(A)
    assert len(basis) == A.ncols - _sympy(rows).rank() == nullity(A)
    for v in basis:
        assert all(x == 0 for x in A.apply(v))
    if basis:
        assert rank(RatMatrix.from_columns(basis)) == len(basis)


@settings(max_examples=150, deadline=None)
@given(sparse_matrices(), st.data())
def test_solve_recovers_consistent_right_hand_sides(rows, data):
    A = RatMatrix.from_dense(rows)
    x0 = data.draw(st.lists(small_q, min_size=A.ncols, max_size=A.ncols))
    b = A.apply(x0)
    x = solve(A, b)
    assert A.apply(x) == b


@settings(max_examples=100, deadline=None)
@given(sparse_matrices())
def test_pivot_columns_span_the_column_space(rows):
    A = RatMatrix.from_dense(rows)
    piv = pivot_columns(A)
    assert len(piv) == rank(A)
    cols = [[A[i, j] for i in range(A.nrows)] for j in piv]
    if cols:
        assert rank(RatMatrix.from_columns(cols, nrows=A.nrows)) == len(piv)


def test_inconsistent_system_is_rejected():
    A = RatMatrix.from_dense([[1, 1], [2, 2]])
    with pytest.raises(ValueError):
        solve(A, [1, 3])
    assert not in_column_space(A, [1, 3])
    assert in_column_space(A, [1, 2])


def test_rationals_are_reduced_and_floats_refused():
    assert as_rational("6/8") == Fraction(3, 4)
    assert fstr(Fraction(-6, 8)) == "-3/4"
    assert fstr(Fraction(4, 2)) == "2"
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_matrix_arithmetic_and_shapes():
    A = RatMatrix.from_dense([[1, 2], [3, 4]])
    I = RatMatrix.identity(2)
    assert A @ I == A
    assert (A - A).is_zero()
    assert A.T[0, 1] == 3
    assert A.commutator(A).is_zero()
    with pytest.raises(ValueError):
        A @ RatMatrix(3, 3)
    with pytest.raises(ValueError):
        RatMatrix.from_dense([[1, 2], [3]])


def test_primitive_integer_normalizes_sign_and_content():
    assert primitive_integer([Fraction(-1, 2), Fraction(1, 3), 0]) == [3, -2, 0]
    assert primitive_integer([0, 0]) == [0, 0]

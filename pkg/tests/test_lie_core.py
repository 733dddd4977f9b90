import json
import random
from fractions import Fraction

import pytest

from tractorlab.lie_core import (UnsupportedAlgebra, adjoint_rep, algebra_from_json, bracket, build_algebra,
                                 build_conformal_algebra, build_grassmannian_algebra, build_projective_algebra,
                                 build_rep, check_homomorphism, density_rep, dual_plus_basis, duality_scale,
                                 jacobi_residual_is_zero, natural_pairing, parse_algebra_spec, standard_rep,
                                 trace_form)
from tractorlab.parabolic_models import block_matrix_of, grassmannian_slots

ALGEBRAS = [("conformal", (3,)), ("conformal", (4,)), ("projective", (2,)), ("projective", (3,)),
            ("grassmannian", (2, 2)), ("grassmannian", (2, 3))]


def rand_in(alg, grade, rnd):
    v = [Fraction(0)] * alg.dim
    for i in alg.indices(grade):
        v[i] = Fraction(rnd.randint(-6, 6), rnd.randint(1, 4))
    return v


def rand_el(alg, rnd):
    return [Fraction(rnd.randint(-6, 6), rnd.randint(1, 4)) for _ in range(alg.dim)]


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


@pytest.mark.parametrize("kind,params,dim,grades", [
    ("conformal", (3,), 10, (3, 4, 3)),
    ("conformal", (5,), 21, (5, 11, 5)),
    ("projective", (2,), 8, (2, 4, 2)),
    ("projective", (4,), 24, (4, 16, 4)),
    ("grassmannian", (2, 2), 15, (4, 7, 4)),
    ("grassmannian", (2, 3), 24, (6, 12, 6)),
])
def test_dimensions_and_grade_blocks(kind, params, dim, grades):
    alg = build_algebra(kind, params)
    assert alg.dim == dim
    assert alg.grade_dims() == grades


@pytest.mark.parametrize("kind,params", ALGEBRAS)
def test_grading_element_acts_by_the_grade(kind, params):
    alg = build_algebra(kind, params)
    E = alg.unit(alg.grading_element_index)
    for i in range(alg.dim):
        X = alg.unit(i)
        assert bracket(alg, E, X) == [alg.grade[i] * c for c in X]


def test_conformal_grading_element_is_the_diagonal_matrix():
    alg = build_conformal_algebra(4)
    E = alg.basis[alg.grading_element_index].to_dense()
    assert [E[i][i] for i in range(6)] == [1, 0, 0, 0, 0, -1]


def test_projective_elements_are_trace_free_and_E_has_the_weighted_diagonal():
    alg = build_projective_algebra(3)
    assert all(B.trace() == 0 for B in alg.basis)
    E = alg.basis[alg.grading_element_index].to_dense()
    assert [E[i][i] for i in range(4)] == [Fraction(3, 4)] + [Fraction(-1, 4)] * 3


def test_jacobi_on_all_basis_triples():
    assert jacobi_residual_is_zero(build_conformal_algebra(3))
    assert jacobi_residual_is_zero(build_grassmannian_algebra(2, 2))


def test_brackets_respect_grading():
    rnd = random.Random(1)
    alg = build_conformal_algebra(3)
    for _ in range(10):
        X = rand_el(alg, rnd)
        assert not any(bracket(alg, X, X))
        Z = bracket(alg, rand_in(alg, 1, rnd), rand_in(alg, -1, rnd))
        assert all(Z[i] == 0 for i in alg.minus + alg.plus)
        assert not any(bracket(alg, rand_in(alg, 1, rnd), rand_in(alg, 1, rnd)))


def test_bracket_rejects_wrong_length():
    alg = build_conformal_algebra(3)
    with pytest.raises(ValueError):
        bracket(alg, [1, 2], alg.unit(0))


def test_trace_form_examples_and_invariance():
    rnd = random.Random(2)
    alg = build_conformal_algebra(3)
    E = alg.unit(alg.grading_element_index)
    assert trace_form(alg, E, E) == 2
    assert trace_form(alg, rand_in(alg, -1, rnd), rand_in(alg, -1, rnd)) == 0
    for kind, params in ALGEBRAS:
        alg = build_algebra(kind, params)
        for _ in range(5):
            X, Y, Z = (rand_el(alg, rnd) for _ in range(3))
            assert trace_form(alg, bracket(alg, Z, X), Y) + trace_form(alg, X, bracket(alg, Z, Y)) == 0


@pytest.mark.parametrize("kind,params,scale", [("conformal", (3,), 2), ("projective", (2,), 1),
                                               ("grassmannian", (2, 3), 1)])
def test_duality_pairs_g1_with_gminus1(kind, params, scale):
    alg = build_algebra(kind, params)
    assert duality_scale(alg) == scale
    duals = dual_plus_basis(alg)
    for i, Z in zip(alg.minus, duals):
        for j in alg.minus:
            assert trace_form(alg, Z, alg.unit(j)) == (1 if i == j else 0)
            assert natural_pairing(alg, alg.unit(alg.plus[alg.minus.index(i)]), alg.unit(j)) == (1 if i == j else 0)


def test_grassmannian_double_bracket_index_formula():
    p, q = 2, 3
    alg = build_grassmannian_algebra(p, q)
    s = grassmannian_slots(p, q)
    v, w = s["v"], s["w"]
    rnd = random.Random(3)
    for _ in range(10):
        U, X, Y = rand_in(alg, 1, rnd), rand_in(alg, -1, rnd), rand_in(alg, -1, rnd)
        got = bracket(alg, bracket(alg, U, X), Y)
        Ub, Xb, Yb = block_matrix_of(alg, U, v, w), block_matrix_of(alg, X, w, v), block_matrix_of(alg, Y, w, v)
        a, b = matmul(matmul(Xb, Ub), Yb), matmul(matmul(Yb, Ub), Xb)
        expect = [[-a[i][j] - b[i][j] for j in range(p)] for i in range(q)]
        assert block_matrix_of(alg, got, w, v) == expect
        assert all(got[i] == 0 for i in alg.zero + alg.plus)


@pytest.mark.parametrize("kind,params", ALGEBRAS)
@pytest.mark.parametrize("label", ["adjoint", "standard", "tangent", "cotangent", "density(3/2)"])
def test_representations_are_homomorphisms(kind, params, label):
    assert check_homomorphism(build_rep(build_algebra(kind, params), label))


def test_adjoint_grades_and_E_eigenvalues():
    alg = build_conformal_algebra(3)
    ad = adjoint_rep(alg)
    assert sorted(ad.module_grade) == sorted(alg.grade)
    E = ad.matrix(alg.unit(alg.grading_element_index)).to_dense()
    assert all(E[i][j] == 0 for i in range(alg.dim) for j in range(alg.dim) if i != j)
    assert {E[i][i] for i in range(alg.dim)} == {-1, 0, 1}


def test_standard_rep_E_eigenvalues_conformal():
    std = standard_rep(build_conformal_algebra(3))
    assert std.module_dim == 5
    assert list(std.module_grade) == [1, 0, 0, 0, -1]


def test_density_rep_weight_convention():
    alg = build_conformal_algebra(3)
    d = density_rep(alg, 2)
    E = d.matrix(alg.unit(alg.grading_element_index))
    assert E[0, 0] == -2
    assert d.plus_acts_trivially


@pytest.mark.parametrize("kind,params", [("conformal", (2,)), ("projective", (1,)), ("grassmannian", (1, 3)),
                                         ("grassmannian", (3, 2)), ("exceptional", (2,))])
def test_unsupported_parameters_are_rejected(kind, params):
    with pytest.raises(UnsupportedAlgebra):
        build_algebra(kind, params)


def test_algebra_spec_parsing():
    assert parse_algebra_spec("conformal:4") == ("conformal", (4,))
    assert parse_algebra_spec("grassmannian:2,3") == ("grassmannian", (2, 3))
    with pytest.raises(ValueError):
        parse_algebra_spec("conformal")


def test_json_round_trip_rebuilds_the_same_structure():
    alg = build_grassmannian_algebra(2, 2)
    doc = json.loads(alg.dumps())
    back = algebra_from_json(doc)
    assert back.cijk == alg.cijk and back.grade == alg.grade
    doc["cijk"][0][3] = "17"
    with pytest.raises(ValueError):
        algebra_from_json(doc)

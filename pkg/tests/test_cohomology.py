import random
from fractions import Fraction
from math import comb

import pytest

from tractorlab.cohomology import (DegreeError, boundary, coboundary, codifferential,
                                   cochain_space, cohomology_dims, complex_axioms, complex_for,
                                   count_irreducibles, g0_action_on_cochains, harmonic_basis,
                                   hodge_decomposition, is_block_diagonal, laplacian)
from tractorlab.exact import RatMatrix, rank

SMALL = [("conformal", (3,), "adjoint"), ("conformal", (3,), "standard"), ("projective", (2,), "adjoint"),
         ("projective", (3,), "standard"), ("grassmannian", (2, 2), "standard")]


def rand_g0(alg, rnd):
    return [Fraction(rnd.randint(-4, 4), rnd.randint(1, 3)) if g == 0 else Fraction(0) for g in alg.grade]


def test_cochain_dimension_formula():
    cx = complex_for("conformal", (3,), "adjoint")
    assert coboundary(cx.alg, cx.rep, 2).domain.dim == comb(3, 2) * 10 == 30
    for k in range(4):
        assert cochain_space(cx.alg, cx.rep, k).dim == comb(3, k) * 10


def test_degree_out_of_range_is_rejected():
    cx = complex_for("conformal", (3,), "adjoint")
    with pytest.raises(DegreeError):
        cochain_space(cx.alg, cx.rep, 4)
    with pytest.raises(DegreeError):
        codifferential(cx.alg, cx.rep, 0)


@pytest.mark.parametrize("kind,params,label", SMALL)
def test_squares_vanish(kind, params, label):
    cx = complex_for(kind, params, label)
    m = cx.top
    for k in range(m - 1):
        assert (cx.d(k + 1).matrix @ cx.d(k).matrix).is_zero()
    for k in range(2, m + 1):
        assert (cx.dstar(k - 1).matrix @ cx.dstar(k).matrix).is_zero()
        assert (cx.delta(k - 1).matrix @ cx.delta(k).matrix).is_zero()


def test_zeroth_homology_of_the_standard_tractors():
    cx = complex_for("conformal", (3,), "standard")
    # g_1 . V is spanned by the columns of all g_1 action matrices
    stacked = RatMatrix.hstack(*[cx.rep.action[i] for i in cx.alg.plus])
    d1 = boundary(cx.alg, cx.rep, 1)
    assert d1.rank() == rank(stacked) == 4
    assert cx.rep.module_dim - d1.rank() == 1


@pytest.mark.parametrize("kind,params,label", SMALL)
def test_harmonic_cochains_are_closed_and_coclosed(kind, params, label):
    cx = complex_for(kind, params, label)
    for k in range(cx.top + 1):
        for _, v in harmonic_basis(cx, None, k):
            if k < cx.top:
                assert not any(cx.d(k)(v))
            if k >= 1:
                assert not any(cx.dstar(k)(v))


@pytest.mark.parametrize("kind,params,label", SMALL)
def test_hodge_dimensions_add_up_and_match_rank_arithmetic(kind, params, label):
    cx = complex_for(kind, params, label)
    for k in range(cx.top + 1):
        rep = hodge_decomposition(cx, None, k)
        assert rep.dim_im_dstar + rep.dim_ker_box + rep.dim_im_d == rep.dim_C
        assert rep.dim_ker_box == rep.dim_H == cohomology_dims(cx.alg, cx.rep, k)
        assert sum(rep.homogeneity_histogram.values()) == rep.dim_H


def test_laplacian_is_block_diagonal_and_commutes_with_g0():
    rnd = random.Random(5)
    cx = complex_for("conformal", (4,), "adjoint")
    for k in range(cx.top + 1):
        C = cx.space(k)
        box = laplacian(cx.alg, cx.rep, k).matrix
        assert is_block_diagonal(box, C.homogeneity)
        for _ in range(2):
            G = g0_action_on_cochains(cx.alg, cx.rep, k, rand_g0(cx.alg, rnd))
            assert (G @ box - box @ G).is_zero()


def test_g0_action_rejects_elements_outside_g0():
    cx = complex_for("conformal", (3,), "adjoint")
    with pytest.raises(ValueError):
        g0_action_on_cochains(cx.alg, cx.rep, 1, cx.alg.unit(cx.alg.minus[0]))


def test_g0_action_on_cochains_is_a_representation():
    rnd = random.Random(6)
    cx = complex_for("projective", (3,), "standard")
    alg = cx.alg
    from tractorlab.lie_core import bracket
    for k in (1, 2):
        A, B = rand_g0(alg, rnd), rand_g0(alg, rnd)
        GA, GB = (g0_action_on_cochains(alg, cx.rep, k, Z) for Z in (A, B))
        GAB = g0_action_on_cochains(alg, cx.rep, k, bracket(alg, A, B))
        assert GAB == GA @ GB - GB @ GA


@pytest.mark.parametrize("n", [3, 4, 5])
def test_standard_tractor_cohomology_low_degrees(n):
    # H^0 is the density line, H^1 the trace-free symmetric forms
    cx = complex_for("conformal", (n,), "standard")
    assert cohomology_dims(cx.alg, cx.rep, 0) == 1
    assert cohomology_dims(cx.alg, cx.rep, 1) == n * (n + 1) // 2 - 1


@pytest.mark.parametrize("n", [3, 4])
def test_conformal_cohomology_dims_are_symmetric(n):
    for label in ("adjoint", "standard"):
        cx = complex_for("conformal", (n,), label)
        dims = [cohomology_dims(cx.alg, cx.rep, k) for k in range(n + 1)]
        assert dims == dims[::-1]


def test_irreducible_counts():
    cx = complex_for("conformal", (3,), "standard")
    assert cohomology_dims(cx.alg, cx.rep, 0) == 1
    assert count_irreducibles(cx, None, 0) == 1
    cx4 = complex_for("conformal", (4,), "standard")
    assert count_irreducibles(cx4, None, 1) == 1
    # the middle degree splits into self-dual and anti-self-dual parts
    assert count_irreducibles(cx4, None, 2) == 2


def test_conformal_adjoint_degree_two_count_matches_fixture():
    from tractorlab.fixtures import load_fixture

    frozen = load_fixture("conventions.json")["conformal_irreducible_count"]
    cx = complex_for("conformal", (4,), "adjoint")
    assert count_irreducibles(cx, None, 2) == frozen["count"] == 2


def test_grassmannian_three_three_harmonic_curvature():
    cx = complex_for("grassmannian", (3, 3), "adjoint")
    rep = hodge_decomposition(cx, None, 2)
    assert set(rep.homogeneity_histogram) == {1}
    assert count_irreducibles(cx, None, 2, basis=list(rep.harmonic_basis)) == 2


def test_complex_axioms_report():
    cx = complex_for("projective", (2,), "adjoint")
    for k in range(3):
        out = complex_axioms(cx, None, k)
        assert out["ok"], out
        assert out["dims"]["dim_H"] == cohomology_dims(cx.alg, cx.rep, k)


def test_hodge_report_json_shape():
    cx = complex_for("conformal", (4,), "adjoint")
    doc = hodge_decomposition(cx, None, 2).to_json()
    assert doc["homogeneity_histogram"] == {"2": doc["dim_H"]}
    assert {"degree", "dim_C", "dim_im_dstar", "dim_ker_box", "dim_im_d", "dim_H", "harmonic_basis",
            "algebra", "rep"} <= set(doc)
    assert doc["algebra"] == "conformal:4"


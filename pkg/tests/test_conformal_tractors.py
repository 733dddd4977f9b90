from fractions import Fraction

import numpy as np
import pytest

from tractorlab.conformal.transport import Curve, circular_arc
from tractorlab.conformal_numeric import (DensityField, NotFlat, Segment, TractorField, TractorVec, builtin_chart,
                                          check_rescale_laws, closure_residual, einstein_operator,
                                          einstein_recover, flatness_probe, holonomy_loop, holonomy_study,
                                          parallel_transport, prolong, rescale, scalar, square_loop,
                                          thomas_D, tractor_change, tractor_connection_apply, tractor_metric,
                                          yamabe)


def sample(chart, seed, count, margin=0.1):
    return chart.sample(np.random.default_rng(seed), count, margin)


def dens(expr, n, w):
    return DensityField(w, scalar(expr, n))


# --- Einstein operator, prolongation, closure


def test_einstein_operator_examples():
    sph, flat = builtin_chart("sphere", 3), builtin_chart("flat", 3)
    x = np.array([0.3, -0.4, 0.2])
    assert np.max(np.abs(einstein_operator(sph, dens("1", 3, 1), x))) < 1e-12
    assert np.max(np.abs(einstein_operator(flat, dens("1 + x0**2 + x1**2 + x2**2", 3, 1), x))) < 1e-12
    E = einstein_operator(flat, dens("x0**2", 3, 1), x)
    want = np.zeros((3, 3))
    want[0, 0] = 2
    want -= 2 / 3 * np.eye(3)
    assert np.allclose(E, want, atol=1e-12)


def test_prolongation_examples():
    sph, flat = builtin_chart("sphere", 4), builtin_chart("flat", 3)
    t = prolong(sph, dens("1", 4, 1), np.array([0.1, 0.2, -0.3, 0.4]))
    assert t.sigma == 1 and np.allclose(t.mu, 0) and abs(t.rho + 0.5) < 1e-12
    t = prolong(flat, dens("1 + x0**2 + x1**2 + x2**2", 3, 1), np.zeros(3))
    assert np.allclose(t.array(), [1, 0, 0, 0, -2])
    assert prolong(flat, dens("0", 3, 1), np.ones(3)).norm_inf() == 0


def test_closure_residuals():
    sph, flat = builtin_chart("sphere", 3), builtin_chart("flat", 3)
    assert closure_residual(sph, dens("1", 3, 1), sample(sph, 0, 5))["max"] <= 1e-9
    assert closure_residual(flat, dens("1 + x0**2 + x1**2 + x2**2", 3, 1), sample(flat, 0, 5))["max"] <= 1e-10
    assert closure_residual(flat, dens("x0**3", 3, 1), sample(flat, 0, 5))["max"] > 1e-3


def test_frozen_einstein_solutions_are_parallel_and_closed():
    from tractorlab.fixtures import load_fixture

    for sol in load_fixture("einstein_solutions.json")["solutions"]:
        ch = builtin_chart(sol["chart"], sol["n"])
        sigma = dens(sol["sigma"], sol["n"], 1)
        pts = sample(ch, 1, 4, margin=0.3)
        assert closure_residual(ch, sigma, pts)["max"] <= 1e-9
        field = TractorField.prolonged(ch, sigma)
        for x in pts:
            assert np.max(np.abs(einstein_operator(ch, sigma, x))) <= 1e-9
            for a in range(ch.n):
                assert tractor_connection_apply(ch, field, a, x).norm_inf() <= 1e-7


# --- Thomas D and the Yamabe operator


@pytest.mark.parametrize("n", [3, 4])
def test_thomas_D_slot_structure(n):
    ch = builtin_chart("poly", n)
    f = scalar("2 + x0*x1 - x%d**2/3" % (n - 1), n)
    for x in sample(ch, 2, 4):
        D0 = thomas_D(ch, f, x, w=0)
        grad = f.jet(x, 1).d1
        assert D0.sigma == 0 and np.allclose(D0.mu, (n - 2) * grad, atol=1e-12)
        w = Fraction(2 - n, 2)
        Dy = thomas_D(ch, f, x, w=w)
        assert Dy.sigma == 0 and not np.any(Dy.mu)
        assert abs(Dy.rho + yamabe(ch, DensityField(w, f), x)) < 1e-12
        D1 = thomas_D(ch, f, x, w=1)
        assert np.allclose(D1.array(), n * prolong(ch, DensityField(1, f), x).array(), atol=1e-10)


def test_thomas_D_needs_a_weight():
    with pytest.raises(ValueError):
        thomas_D(builtin_chart("flat", 3), scalar("1", 3), np.zeros(3))


def test_yamabe_examples():
    flat, sph = builtin_chart("flat", 3), builtin_chart("sphere", 4)
    x = np.array([0.5, -1.0, 2.0])
    assert abs(yamabe(flat, dens("x0**2*x1 + x2**3", 3, Fraction(-1, 2)), x) - (2 * x[1] + 6 * x[2])) < 1e-12
    for y in sample(sph, 3, 3):
        assert abs(yamabe(sph, dens("1", 4, -1), y) + 2) < 1e-10


def test_yamabe_is_conformally_covariant_in_dimension_four():
    ch = builtin_chart("poly", 4)
    Om = scalar("1 + x0**2/4 + x1*x3/5 - x2/7", 4)
    pts = sample(ch, 4, 10, margin=0.2)
    res = check_rescale_laws(ch, Om, pts)["residuals"]
    assert res["yamabe"] <= 1e-8 and res["thomas_D"] <= 1e-8


# --- tractor connection and rescaling


def test_flat_cone_fields_are_parallel():
    flat = builtin_chart("flat", 3)
    field = TractorField.constant_flat(1.5, [0.2, -1, 0.5], 0.7, np.zeros(3))
    for x in sample(flat, 5, 5):
        for a in range(3):
            assert tractor_connection_apply(flat, field, a, x).norm_inf() < 1e-12
            assert tractor_connection_apply(flat, TractorField.zero(3), a, x).norm_inf() == 0


def test_connection_satisfies_leibniz():
    ch = builtin_chart("poly", 3)
    base = TractorField.prolonged(ch, dens("1 + x0*x2/3", 3, 1))
    f = scalar("2 + x1**2", 3)
    for x in sample(ch, 6, 3):
        fv, df = f(x), f.jet(x, 1).d1
        s0, _, mu, _, r, _ = base.evaluate(x)
        T = np.array([s0, *mu, r])
        for a in range(3):
            lhs = tractor_connection_apply(ch, base.scaled(f), a, x).array()
            rhs = fv * tractor_connection_apply(ch, base, a, x).array() + df[a] * T
            assert np.allclose(lhs, rhs, atol=1e-10)


def test_tractor_change_round_trip_and_metric():
    ch = builtin_chart("poly", 3)
    Om = scalar("1 + x0**2/3 + x1/4", 3)
    inv = scalar("1/(1 + x0**2/3 + x1/4)", 3)
    x = np.array([0.1, -0.2, 0.3])
    ginv = np.linalg.inv(ch.metric(x))
    t = TractorVec(0.7, np.array([0.1, -2.0, 0.4]), 1.3)
    there = tractor_change(t, Om, ginv, x)
    ginv_hat = np.linalg.inv(rescale(ch, Om).metric(x))
    back = tractor_change(there, inv, ginv_hat, x)
    assert np.allclose(back.array(), t.array(), atol=1e-12)
    assert abs(tractor_metric(ginv, t.array()) - tractor_metric(ginv_hat, there.array())) < 1e-12


def test_rescale_laws_with_unit_factor_are_exact():
    ch = builtin_chart("poly", 3)
    res = check_rescale_laws(ch, scalar("1", 3), sample(ch, 7, 3))["residuals"]
    assert all(v == 0 for v in res.values()), res


def test_rescale_laws_on_the_polynomial_metric():
    ch = builtin_chart("poly", 3)
    Om = scalar("(1 + x0/3 - x1*x2/4)**2 + x2**2/5", 3)
    res = check_rescale_laws(ch, Om, sample(ch, 8, 20))["residuals"]
    assert max(res.values()) <= 1e-9, res


# --- transport, holonomy and recovery


def test_flat_transport_matches_the_closed_form():
    flat = builtin_chart("flat", 3)
    v0 = TractorVec(1.0, np.array([0.3, -0.2, 0.5]), 0.8)
    a, b = np.array([0.5, 0.1, -0.3]), np.array([-1.0, 2.0, 0.7])
    dx = b - a
    got = parallel_transport(flat, Segment(a, b), v0, h=0.1)
    want = [v0.sigma + v0.mu @ dx - 0.5 * v0.rho * dx @ dx, *(v0.mu - v0.rho * dx), v0.rho]
    assert np.max(np.abs(got.array() - want)) <= 1e-10
    zero = parallel_transport(flat, Segment(a, b), TractorVec(0.0, np.zeros(3), 0.0))
    assert zero.norm_inf() == 0


def test_rk4_is_fourth_order_along_a_curved_path():
    flat = builtin_chart("flat", 3)
    arc = circular_arc(np.zeros(3), 1.5, 0.0, 3.0)
    assert isinstance(arc, Curve)
    v0 = TractorVec(1.0, np.array([0.3, -0.2, 0.5]), 0.8)
    dx = arc.b - arc.a
    exact = np.array([v0.sigma + v0.mu @ dx - 0.5 * v0.rho * dx @ dx, *(v0.mu - v0.rho * dx), v0.rho])
    errs = [np.max(np.abs(parallel_transport(flat, arc, v0, steps=s).array() - exact)) for s in (25, 50, 100)]
    slope = np.polyfit(np.log([1 / 25, 1 / 50, 1 / 100]), np.log(errs), 1)[0]
    assert 3.6 <= slope <= 4.4, errs


def test_transport_preserves_the_tractor_metric_on_curved_charts():
    ch = builtin_chart("poly", 3)
    a, b = np.array([-0.3, 0.2, 0.1]), np.array([0.35, -0.1, -0.2])
    v0 = TractorVec(0.4, np.array([1.0, 0.2, -0.3]), 0.9)
    v1 = parallel_transport(ch, Segment(a, b), v0, h=1e-2)
    h0 = tractor_metric(np.linalg.inv(ch.metric(a)), v0.array())
    h1 = tractor_metric(np.linalg.inv(ch.metric(b)), v1.array())
    assert abs(h0 - h1) < 1e-8


def test_transport_checks_the_domain():
    from tractorlab.conformal_numeric import DomainError

    with pytest.raises(DomainError):
        parallel_transport(builtin_chart("sphere", 3), Segment(np.zeros(3), np.array([3.0, 0, 0])),
                           TractorVec(1.0, np.zeros(3), 0.0))


def test_flat_holonomy_is_trivial():
    flat = builtin_chart("flat", 3)
    H = holonomy_loop(flat, square_loop(np.array([0.2, -0.1, 0.4]), 0.3))
    assert np.max(np.abs(H - np.eye(5))) <= 1e-10
    with pytest.raises(ValueError):
        holonomy_loop(flat, [Segment(np.zeros(3), np.ones(3))])


def test_sphere_holonomy_decays_faster_than_area():
    study = holonomy_study(builtin_chart("sphere", 3), np.array([0.3, -0.2, 0.1]))
    assert study["slope"] >= 2.5, study


def test_non_einstein_metric_has_area_law_holonomy():
    ch = builtin_chart("poly", 3)
    study = holonomy_study(ch, np.zeros(3), plane=(0, 1))
    assert 1.7 <= study["slope"] <= 2.3, study
    with pytest.raises(NotFlat):
        flatness_probe(ch, np.zeros(3))


def test_einstein_recovery_on_the_sphere():
    sph = builtin_chart("sphere", 3)
    v0 = prolong(sph, dens("1", 3, 1), np.zeros(3))
    pts = sample(sph, 9, 2, margin=0.35)
    out = einstein_recover(sph, np.zeros(3), v0, pts, h=1e-3)
    assert max(abs(s - 1) for s in out["sigma"]) <= 1e-8
    assert out["max_einstein_residual"] <= 1e-6


def test_einstein_recovery_with_a_nonconstant_scale():
    sph = builtin_chart("sphere", 3)
    v0 = TractorVec(1.0, np.array([0.4, 0.0, -0.2]), -0.5)
    pts = sample(sph, 10, 2, margin=0.35)
    out = einstein_recover(sph, np.zeros(3), v0, pts, h=2e-3)
    assert np.ptp(out["sigma"]) > 1e-2
    assert out["max_einstein_residual"] <= 1e-6


def test_einstein_recovery_on_the_flat_chart_and_refusal_when_curved():
    flat = builtin_chart("flat", 3)
    pts = [np.array([0.3, -0.2, 0.1]), np.array([-0.5, 0.4, 0.2])]
    out = einstein_recover(flat, np.zeros(3), TractorVec(1.0, np.zeros(3), 0.0), pts, h=1e-2)
    assert out["sigma"] == [1.0, 1.0] and out["max_einstein_residual"] == 0
    poly = builtin_chart("poly", 3)
    with pytest.raises(NotFlat):
        einstein_recover(poly, np.zeros(3), TractorVec(1.0, np.zeros(3), 0.0), [np.full(3, 0.1)])

import numpy as np
import pytest
import sympy as sp

from tractorlab.conformal.jets import compose, log_jet, power
from tractorlab.conformal_numeric import (ChartError, DomainError, bianchi_checks, builtin_chart, chart_from_spec,
                                          christoffel, curvature_checks, curvature_suite, flat_chart,
                                          gamma_hat_formula, rescale, scalar, sphere_chart, upsilon)


def sample(chart, seed, count, margin=0.1):
    return chart.sample(np.random.default_rng(seed), count, margin)


def test_power_and_log_jets_match_symbolic_derivatives():
    f = scalar("2 + x0**2 + x0*x1 - x2/3", 3)
    x = np.array([0.3, -0.2, 0.7])
    J = f.jet(x, 3)
    for got, expr in [(power(J, 1.5, 3), "(2 + x0**2 + x0*x1 - x2/3)**(3/2)"),
                      (log_jet(J, 3), "log(2 + x0**2 + x0*x1 - x2/3)")]:
        ref = scalar(expr, 3).jet(x, 3)
        for a, b in zip((got.val, got.d1, got.d2, got.d3), (ref.val, ref.d1, ref.d2, ref.d3)):
            assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_compose_with_exponential():
    f = scalar("x0*x1 + x2**2", 3)
    x = np.array([0.1, 0.4, -0.3])
    got = compose(lambda t, k: np.exp(t), f.jet(x, 2), 2)
    ref = scalar("exp(x0*x1 + x2**2)", 3).jet(x, 2)
    assert np.allclose(got.d2, ref.d2, rtol=1e-12)


def test_chart_domain_and_dimension_checks():
    ch = builtin_chart("sphere", 3)
    with pytest.raises(DomainError):
        ch.metric([5.0, 0, 0])
    with pytest.raises(DomainError):
        ch.metric([0.0, 0.0])
    with pytest.raises(ChartError):
        flat_chart(2)
    with pytest.raises(ChartError):
        builtin_chart("torus", 3)
    with pytest.raises(ChartError):
        builtin_chart("poly", 6)


def test_chart_from_spec_with_custom_domain():
    ch = chart_from_spec({"chart": "sphere", "n": 3, "domain": [[-1, 1]] * 3})
    assert ch.in_domain([0.9, 0, 0]) and not ch.in_domain([1.5, 0, 0])
    with pytest.raises(ChartError):
        chart_from_spec({"chart": "flat", "n": 3, "domain": [[1, 0]] * 3})


@pytest.mark.parametrize("kind", ["sphere", "poly"])
def test_symbolic_partials_agree_with_finite_differences(kind):
    ch = builtin_chart(kind, 3)
    report = ch.validate(sample(ch, 0, 5))
    assert all(v for k, v in report.items() if isinstance(v, bool)), report


def test_flat_chart_has_no_curvature():
    ch = builtin_chart("flat", 3)
    for x in sample(ch, 1, 4):
        pc = curvature_suite(ch, x)
        assert not np.any(pc.Gamma) and not np.any(pc.Riem) and not np.any(pc.P) and not np.any(pc.W)


def test_sphere_christoffel_vanishes_at_the_origin():
    assert np.max(np.abs(christoffel(builtin_chart("sphere", 4), np.zeros(4)))) == 0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_round_sphere_constant_curvature(n):
    ch = builtin_chart("sphere", n)
    for x in sample(ch, n, 5):
        pc = curvature_suite(ch, x)
        assert np.allclose(pc.Ric, (n - 1) * pc.g, atol=1e-9)
        assert abs(pc.R - n * (n - 1)) < 1e-9
        assert np.allclose(pc.P, 0.5 * pc.g, atol=1e-9)
        assert abs(pc.J - n / 2) < 1e-9
        assert np.max(np.abs(pc.W)) < 1e-9


def test_curvature_symmetries_and_compatibility_on_the_polynomial_metric():
    ch = builtin_chart("poly", 4)
    rep = curvature_checks(ch, sample(ch, 2, 10))
    assert max(rep["residuals"].values()) < 1e-9, rep


def test_schouten_agrees_with_an_independent_sympy_computation():
    # Ricci and Schouten of a conformally flat metric computed directly in sympy
    n = 3
    xs = sp.symbols("x0:3")
    phi = 1 + xs[0] ** 2 / 5 + xs[1] * xs[2] / 7
    G = sp.exp(2 * phi) * sp.eye(n)
    Ginv = G.inv()
    Gam = [[[sum(Ginv[c, d] * (sp.diff(G[d, a], xs[b]) + sp.diff(G[d, b], xs[a]) - sp.diff(G[a, b], xs[d]))
                 for d in range(n)) / 2 for b in range(n)] for a in range(n)] for c in range(n)]

    def riem(c, d, a, b):  # R^c_dab with the convention R_ab^c_d = this at (c, d, a, b)
        return (sp.diff(Gam[c][b][d], xs[a]) - sp.diff(Gam[c][a][d], xs[b])
                + sum(Gam[c][a][e] * Gam[e][b][d] - Gam[c][b][e] * Gam[e][a][d] for e in range(n)))

    pt = {xs[0]: 0.2, xs[1]: -0.3, xs[2]: 0.25}
    ric = np.array([[float(sum(riem(a, b, a, d) for a in range(n)).subs(pt)) for d in range(n)] for b in range(n)])
    g = np.array(G.subs(pt), dtype=float)
    R = float(np.einsum("ab,ab->", np.linalg.inv(g), ric))
    P_ref = (ric - R / (2 * (n - 1)) * g) / (n - 2)

    ch = chart_from_spec({"chart": "flat", "n": 3})
    from tractorlab.conformal.charts import SymbolicChart
    sym = SymbolicChart("test", n, ch.domain, G, xs)
    pc = curvature_suite(sym, np.array([0.2, -0.3, 0.25]))
    assert np.allclose(pc.Ric, ric, atol=1e-10)
    assert np.allclose(pc.P, P_ref, atol=1e-10)


@pytest.mark.parametrize("kind,n,tol", [("flat", 3, 0.0), ("sphere", 3, 1e-8), ("poly", 3, 1e-7), ("poly", 4, 1e-7)])
def test_bianchi_identities(kind, n, tol):
    ch = builtin_chart(kind, n)
    rep = bianchi_checks(ch, sample(ch, 3, 8))
    assert set(rep["residuals"]) == {"first_bianchi", "second_bianchi", "contracted_bianchi", "laplacian_commutator"}
    for key, stats in rep["residuals"].items():
        assert stats["max"] <= tol, (key, stats)


def test_rescaling_flat_by_the_stereographic_factor_gives_the_sphere():
    n = 3
    flat = builtin_chart("flat", n)
    Om = scalar("2/(1 + x0**2 + x1**2 + x2**2)", n)
    hat, sph = rescale(flat, Om), sphere_chart(n)
    for x in sample(sph, 4, 5):
        a, b = hat.metric_jet(x, 2), sph.metric_jet(x, 2)
        for u, v in zip((a.val, a.d1, a.d2), (b.val, b.d1, b.d2)):
            assert np.max(np.abs(u - v)) <= 1e-12


def test_unit_factor_changes_nothing():
    ch = builtin_chart("poly", 3)
    one = scalar("1", 3)
    x = sample(ch, 5, 1)[0]
    assert not np.any(upsilon(one, x))
    assert np.array_equal(rescale(ch, one).metric(x), ch.metric(x))


def test_rescale_rejects_nonpositive_factors():
    ch = builtin_chart("flat", 3)
    with pytest.raises(DomainError):
        rescale(ch, scalar("x0", 3), samples=[np.array([-1.0, 0, 0])])


def test_christoffel_transformation_formula():
    ch = builtin_chart("poly", 3)
    Om = scalar("1 + x0**2/3 + x1*x2/5", 3)
    hat = rescale(ch, Om)
    for x in sample(ch, 6, 6):
        pc = curvature_suite(ch, x)
        Y = upsilon(Om, x)
        assert np.max(np.abs(christoffel(hat, x) - gamma_hat_formula(pc.Gamma, pc.g, pc.ginv, Y))) < 1e-10

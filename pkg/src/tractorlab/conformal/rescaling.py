"""
Conformal rescaling laws checked against independent evaluation in both scales.

Every identity below is evaluated twice.  One side is computed natively in the
rescaled chart (its Christoffel symbols come from the composed jets of
Omega^2 g).  The other side applies the transformation formula to quantities
computed in the original chart.  Test vector and covector fields are fixed
polynomials so their partials are exact.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .charts import DensityField, MetricChart, ScalarField, rescale, scalar, upsilon
from .curvature import christoffel, curvature_suite
from .operators import TractorVec, einstein_operator, prolong, thomas_D, yamabe


def tractor_change(t: TractorVec, Omega: ScalarField, ginv, x, weight=0) -> TractorVec:
    """Express a standard tractor given in scale g in the scale Omega^2 g.

    sigma -> Omega sigma, mu_a -> Omega (mu_a + Y_a sigma),
    rho -> Omega^-1 (rho - Y^a mu_a - 1/2 |Y|^2 sigma), with Y = Upsilon.
    A weighted tractor (weight w) picks up a further factor Omega^w.
    """
    Om = float(Omega(x))
    Y = upsilon(Omega, x)
    Yup = ginv @ Y
    s, mu, r = t.sigma, np.asarray(t.mu), t.rho
    extra = Om ** float(Fraction(weight))
    return TractorVec(extra * Om * s,
                      extra * Om * (mu + Y * s),
                      extra * (r - Yup @ mu - 0.5 * (Y @ Yup) * s) / Om,
                      scale="g_hat", weight=Fraction(weight))


def gamma_hat_formula(Gamma, g, ginv, Y):
    """Gamma^b_ac + delta^b_a Y_c + delta^b_c Y_a - g_ac Y^b."""
    n = len(Y)
    d = np.eye(n)
    return (Gamma + np.einsum("ba,c->bac", d, Y) + np.einsum("bc,a->bac", d, Y)
            - np.einsum("ac,b->bac", g, ginv @ Y))


def _vector_field(n):
    # smooth, fixed test fields with exact partials
    comps = ["1 + x%d**2 - %d*x%d" % ((b + 1) % n, b, b) for b in range(n)]
    return [scalar(c, n) for c in comps]


def _field_jet(fields, x):
    jets = [f.jet(x, 1) for f in fields]
    return np.array([float(j.val) for j in jets]), np.array([j.d1 for j in jets])  # dv[b, a] = d_a v_b


def _max(a):
    return float(np.max(np.abs(a)))


_LAWS = ("gamma_hat", "inverse_metric", "vector", "covector", "density",
         "tractor_change", "einstein_operator", "yamabe", "thomas_D")


def check_rescale_laws(chart: MetricChart, Omega: ScalarField, samples, density_weight=2,
                       sigma: ScalarField = None, f: ScalarField = None, w_thomas=Fraction(1, 2)) -> dict:
    """Max residual per law over the samples (report only; nothing is raised).

    ``sigma`` is the weight-1 density used for the prolongation and Einstein
    operator checks, ``f`` the scalar used for the density, Yamabe and
    Thomas-D laws.  Both default to fixed positive polynomials.
    """
    n = chart.n
    hat = rescale(chart, Omega, samples)
    vfield = _vector_field(n)
    f = f or scalar("2 + x0*x1 - x%d**2/3" % (n - 1), n)
    sigma = sigma or scalar("1 + x0**2/4 + x1/5", n)
    w = Fraction(density_weight)
    yw = Fraction(2 - n, 2)
    res = {k: 0.0 for k in _LAWS}
    for x in samples:
        x = chart.check_point(x)
        pc = curvature_suite(chart, x)
        g, ginv, Gam = pc.g, pc.ginv, pc.Gamma
        Gh = christoffel(hat, x)
        Om = float(Omega(x))
        Y = upsilon(Omega, x)
        ghat = hat.metric(x)

        res["gamma_hat"] = max(res["gamma_hat"], _max(Gh - gamma_hat_formula(Gam, g, ginv, Y)))
        res["inverse_metric"] = max(res["inverse_metric"],
                                    _max(np.linalg.inv(ghat) - ginv / Om ** 2) * Om ** 2)

        v, dv = _field_jet(vfield, x)
        # vectors: nabla_a v^b with v^b the field components
        nab = dv.T + np.einsum("bac,c->ab", Gam, v)
        nab_hat = dv.T + np.einsum("bac,c->ab", Gh, v)
        law = nab + np.outer(Y, v) - np.outer(g @ v, ginv @ Y) + np.eye(n) * (Y @ v)
        res["vector"] = max(res["vector"], _max(nab_hat - law))
        # covectors: nabla_a w_b with the same components read as a covector
        nab = dv.T - np.einsum("cab,c->ab", Gam, v)
        nab_hat = dv.T - np.einsum("cab,c->ab", Gh, v)
        law = nab - np.outer(Y, v) - np.outer(v, Y) + g * (ginv @ Y @ v)
        res["covector"] = max(res["covector"], _max(nab_hat - law))
        # densities: the scale-g_hat function is Omega^w f
        rho = DensityField(w, f)
        hj = rho.rescale(Omega).jet(x, 1)
        fj = f.jet(x, 1)
        law = Om ** float(w) * (fj.d1 + float(w) * Y * float(fj.val))
        res["density"] = max(res["density"], _max(hj.d1 - law))

        # tractors: prolong natively in g_hat against the transported prolongation
        s_g = DensityField(1, sigma)
        native = prolong(hat, s_g.rescale(Omega), x)
        moved = tractor_change(prolong(chart, s_g, x), Omega, ginv, x)
        res["tractor_change"] = max(res["tractor_change"], (native - moved).norm_inf())

        # conformally invariant operators
        E_hat = einstein_operator(hat, s_g.rescale(Omega), x)
        res["einstein_operator"] = max(res["einstein_operator"],
                                       _max(E_hat - Om * einstein_operator(chart, s_g, x)))
        fy = DensityField(yw, f)
        Y_hat = yamabe(hat, fy.rescale(Omega), x)
        res["yamabe"] = max(res["yamabe"], abs(Y_hat - Om ** float(yw - 2) * yamabe(chart, fy, x)))
        fd = DensityField(w_thomas, f)
        D_hat = thomas_D(hat, fd.rescale(Omega), x)
        D_moved = tractor_change(thomas_D(chart, fd, x), Omega, ginv, x, weight=w_thomas - 1)
        res["thomas_D"] = max(res["thomas_D"], (D_hat - D_moved).norm_inf())
    return {"residuals": res, "samples": len(samples), "density_weight": str(w)}

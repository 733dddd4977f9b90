"""
Verification suites shared by the command line and the test-suite.

Every suite returns a list of result rows ``{"name", "passed", ...}``; numeric
rows also carry ``value`` and ``tol``.  Exact rows carry no tolerance.
Randomized inputs come from ``random.Random(seed)`` or
``numpy.random.default_rng(seed)`` so that reports are reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from .cohomology import (complex_axioms, count_irreducibles, harmonic_basis, hodge_decomposition)
from .fixtures import load_fixture
from .lie_core import (adjoint_rep, build_algebra, build_rep, density_rep, natural_pairing,
                       standard_rep, tangent_rep)
from .parabolic_models import (codifferential_as_trace, coboundary1, conformal_minus, conformal_plus,
                               conformal_standard_unpack, conformal_standard_vector, curvature_cochain,
                               is_co_closed, normalize_rho, recalibrate_components,
                               rho_matrix, round_sphere_riemann, tractor_derivative_components,
                               weyl_connection_shift)

DEFAULT_TOLS = {
    "rescale": 1e-9,
    "holonomy_slope": 2.5,
    "flat_holonomy": 1e-10,
    "sigma": 1e-8,
    "einstein": 1e-6,
    "parallel": 1e-7,
    "closure": 1e-9,
    "yamabe": 1e-8,
    "operators": 1e-9,
    "bianchi": 1e-7,
    "curvature": 1e-9,
    "transport": 1e-10,
    "transport_order": 0.2,
    "norm": 1e-8,
}

SWEEP = (("conformal", ((3,), (4,), (5,))),
         ("projective", ((2,), (3,), (4,))),
         ("grassmannian", ((2, 2), (2, 3), (3, 3))))


def exact_row(name, ok, **info):
    row = {"name": name, "passed": bool(ok)}
    row.update(info)
    return row


def tol_row(name, value, tol, below=True, **info):
    value = float(value)
    ok = value <= tol if below else value >= tol
    row = {"name": name, "value": value, "tol": tol, "passed": bool(ok),
           "comparison": "<=" if below else ">="}
    row.update(info)
    return row


def all_passed(rows) -> bool:
    return all(r["passed"] for r in rows)


def _alg_name(kind, params):
    return "%s:%s" % (kind, ",".join(map(str, params)))


def _degrees(alg):
    return range(0, min(3, len(alg.minus)) + 1)


# ---------------------------------------------------------------------------
# cohomology


def cohomology_single(kind, params, rep_label, degree=None, irreducibles=False, basis=False):
    """Hodge report and exact axioms for one complex, one degree or all of 0..3."""
    alg = build_algebra(kind, params)
    rep = build_rep(alg, rep_label)
    degrees = [degree] if degree is not None else list(_degrees(alg))
    rows = []
    for k in degrees:
        hr = hodge_decomposition(alg, rep, k, with_basis=basis or irreducibles)
        ax = complex_axioms(alg, rep, k)
        row = exact_row("%s/%s/k=%d" % (_alg_name(kind, params), rep_label, k), ax["ok"],
                        axioms={key: v for key, v in ax.items() if isinstance(v, bool) and key != "ok"})
        row.update(hr.to_json(include_basis=basis))
        if irreducibles and alg.raising is not None:
            row["irreducibles"] = count_irreducibles(alg, rep, k, list(hr.harmonic_basis))
        rows.append(row)
    return rows


def cohomology_sweep():
    """Exact complex axioms for every algebra, representation and degree of the sweep."""
    rows = []
    for kind, plist in SWEEP:
        for params in plist:
            alg = build_algebra(kind, params)
            for label in ("adjoint", "standard"):
                rep = build_rep(alg, label)
                for k in _degrees(alg):
                    ax = complex_axioms(alg, rep, k)
                    rows.append(exact_row("%s/%s/k=%d" % (_alg_name(kind, params), label, k), ax["ok"],
                                          **{key: v for key, v in ax.items() if key not in ("ok", "degree")}))
    return rows


def _histogram(kind, params, k):
    alg = build_algebra(kind, params)
    return hodge_decomposition(alg, adjoint_rep(alg), k, with_basis=False).homogeneity_histogram


def cohomology_structure():
    """Where the adjoint cohomology sits, and how many irreducible pieces it has."""
    rows = []
    for n in (3, 4, 5):
        h1 = _histogram("conformal", (n,), 1)
        rows.append(exact_row("conformal:%d H1 has no positive homogeneity" % n,
                              all(h <= 0 for h in h1), histogram=h1))
        h2 = _histogram("conformal", (n,), 2)
        want = 3 if n == 3 else 2
        rows.append(exact_row("conformal:%d H2 only in homogeneity %d" % (n, want),
                              bool(h2) and set(h2) == {want}, histogram=h2))
    alg = build_algebra("grassmannian", (3, 3))
    hr = hodge_decomposition(alg, adjoint_rep(alg), 2, with_basis=True)
    rows.append(exact_row("grassmannian:3,3 H2 only in homogeneity 1",
                          bool(hr.homogeneity_histogram) and set(hr.homogeneity_histogram) == {1},
                          histogram=hr.homogeneity_histogram))
    c = count_irreducibles(alg, adjoint_rep(alg), 2, list(hr.harmonic_basis))
    rows.append(exact_row("grassmannian:3,3 H2 has two irreducible components", c == 2, count=c))
    for n in (2, 3):
        h1 = _histogram("projective", (n,), 1)
        rows.append(exact_row("projective:%d H1 has a positive-homogeneity part" % n,
                              any(h > 0 for h in h1), histogram=h1))
    return rows


# ---------------------------------------------------------------------------
# normalization


def _diag(n, c):
    return [[Fraction(c) if a == b else Fraction(0) for b in range(n)] for a in range(n)]


def normalize_suite(ns=(3, 4, 5), seed=0, samples=5):
    """Normalized Rho of constant-curvature cochains, checked exactly against the Schouten form."""
    conv = load_fixture("conventions.json")
    sign = Fraction(conv["rho_equals_minus_schouten"]["multiple_of_schouten"])
    trace = Fraction(conv["codifferential_trace_multiple"]["multiple_of_ricci"])
    rnd = random.Random(seed)
    rows = []
    for n in ns:
        alg = build_algebra("conformal", (n,))
        # constant curvature K: Schouten K/2 g, Ricci (n-1) K g
        Ks = [Fraction(1)] + [Fraction(rnd.choice([-1, 1]) * rnd.randint(1, 9), rnd.randint(1, 7))
                              for _ in range(samples - 1)]
        ok_rho, ok_closed, ok_trace = True, True, True
        for K in Ks:
            R = curvature_cochain(alg, round_sphere_riemann(n, K))
            Rho = normalize_rho(alg, R)
            ok_rho &= rho_matrix(alg, Rho) == _diag(n, sign * K / 2)
            corrected = [a + b for a, b in zip(R, coboundary1(alg, Rho))]
            ok_closed &= is_co_closed(alg, corrected)
            ok_trace &= codifferential_as_trace(alg, R) == _diag(n, trace * (n - 1) * K)
        rows.append(exact_row("conformal:%d Rho = %s * Schouten" % (n, sign), ok_rho, curvatures=Ks))
        rows.append(exact_row("conformal:%d R + d Rho co-closed" % n, ok_closed))
        rows.append(exact_row("conformal:%d d*R = %s Ric" % (n, trace), ok_trace and trace != 0))
        # harmonic curvature (Weyl-type for n >= 4, Cotton-type for n = 3) is co-closed
        harm = harmonic_basis(alg, adjoint_rep(alg), 2)
        rows.append(exact_row("conformal:%d d* vanishes on harmonic 2-cochains" % n,
                              bool(harm) and all(is_co_closed(alg, v) for _, v in harm),
                              harmonic_dim=len(harm), homogeneities=sorted({h for h, _ in harm})))
    return rows


# ---------------------------------------------------------------------------
# algebraic transformation displays


def _rand_q(rnd):
    return Fraction(rnd.randint(-9, 9), rnd.randint(1, 6))


def _block(alg, X, rows, cols):
    M = alg.element(X)
    return [[M[i, j] for j in cols] for i in rows]


def _matmul(A, B):
    return [[sum((A[i][t] * B[t][j] for t in range(len(B))), Fraction(0)) for j in range(len(B[0]))]
            for i in range(len(A))]


def _from_block(alg, grade, block, rows, cols):
    """Element of the given grade whose defining matrix has ``block`` at (rows, cols)."""
    idx = {-1: alg.minus, 1: alg.plus}[grade]
    out = [Fraction(0)] * alg.dim
    for i in idx:
        B = alg.basis[i]
        (r, c), = [(r, c) for r in range(alg.defining_dim) for c in range(alg.defining_dim) if B[r, c] != 0]
        out[i] = Fraction(block[rows.index(r)][cols.index(c)]) / B[r, c]
    return out


def _random_grade(alg, grade, rnd):
    v = [Fraction(0)] * alg.dim
    for i in {-1: alg.minus, 1: alg.plus}[grade]:
        v[i] = _rand_q(rnd)
    return v


def transform_displays(seed=0, samples=20):
    """Algebraic change-of-scale formulas compared with their matrix-block forms."""
    rnd = random.Random(seed)
    rows = []

    # projective n=3, tangent vectors: correction Y(eta) xi + Y(xi) eta
    alg = build_algebra("projective", (3,))
    tan = tangent_rep(alg)
    ok = True
    for _ in range(samples):
        U, X, Y = _random_grade(alg, 1, rnd), _random_grade(alg, -1, rnd), _random_grade(alg, -1, rnd)
        eta = [Y[i] for i in alg.minus]
        got = weyl_connection_shift(tan, U, X, eta)
        uy, ux = natural_pairing(alg, U, Y), natural_pairing(alg, U, X)
        want = [uy * X[i] + ux * Y[i] for i in alg.minus]
        ok &= got == want
    rows.append(exact_row("projective:3 Weyl connection change on vectors", ok, samples=samples))

    # grassmannian (2,3), tangent: correction xi U eta + eta U xi (matrix blocks)
    p, q = 2, 3
    alg = build_algebra("grassmannian", (p, q))
    tan = tangent_rep(alg)
    V, W = list(range(p)), list(range(p, p + q))
    ok = True
    for _ in range(samples):
        U, X, Y = _random_grade(alg, 1, rnd), _random_grade(alg, -1, rnd), _random_grade(alg, -1, rnd)
        u, x, y = _block(alg, U, V, W), _block(alg, X, W, V), _block(alg, Y, W, V)
        a, b = _matmul(x, _matmul(u, y)), _matmul(y, _matmul(u, x))
        want_block = [[a[i][j] + b[i][j] for j in range(p)] for i in range(q)]
        want = _from_block(alg, -1, want_block, W, V)
        got = weyl_connection_shift(tan, U, X, [Y[i] for i in alg.minus])
        ok &= got == [want[i] for i in alg.minus]
    rows.append(exact_row("grassmannian:2,3 Weyl connection change on vectors", ok, samples=samples))

    # grassmannian standard tractors: v -> v - U w, w unchanged
    std = standard_rep(alg)
    ok = True
    for _ in range(samples):
        U = _random_grade(alg, 1, rnd)
        vec = [_rand_q(rnd) for _ in range(p + q)]
        u = _block(alg, U, V, W)
        got = recalibrate_components(std, U, vec).flat()
        w = vec[p:]
        want = [vec[i] - sum(u[i][j] * w[j] for j in range(q)) for i in range(p)] + w
        ok &= list(got) == want
    rows.append(exact_row("grassmannian:2,3 tractor change", ok, samples=samples))

    # conformal densities of weight w: correction +w Y(xi) s
    alg = build_algebra("conformal", (4,))
    ok = True
    for _ in range(samples):
        w = Fraction(rnd.randint(-6, 6), rnd.randint(1, 3))
        U, X = _random_grade(alg, 1, rnd), _random_grade(alg, -1, rnd)
        s = _rand_q(rnd)
        got = weyl_connection_shift(density_rep(alg, w), U, X, [s])
        u = [U[i] for i in alg.plus]
        x = [X[i] for i in alg.minus]
        ok &= got == [w * sum(a * b for a, b in zip(u, x)) * s]
    rows.append(exact_row("conformal:4 Weyl connection change on densities", ok, samples=samples))

    # conformal standard tractors: (s, m, r) -> (s, m + s U, r - U.m - |U|^2 s / 2)
    for n in (3, 4):
        alg = build_algebra("conformal", (n,))
        std = standard_rep(alg)
        ok = True
        for _ in range(samples):
            u = [_rand_q(rnd) for _ in range(n)]
            s, m, r = _rand_q(rnd), [_rand_q(rnd) for _ in range(n)], _rand_q(rnd)
            got = recalibrate_components(std, conformal_plus(alg, u),
                                         conformal_standard_vector(n, s, m, r)).flat()
            s2, m2, r2 = conformal_standard_unpack(n, list(got))
            uu = sum(a * a for a in u)
            ok &= (s2 == s and m2 == [mi + s * ui for mi, ui in zip(m, u)]
                   and r2 == r - sum(a * b for a, b in zip(u, m)) - uu * s / 2)
        rows.append(exact_row("conformal:%d tractor change" % n, ok, samples=samples))
    return rows


# ---------------------------------------------------------------------------
# cross-layer: algebraic tractor derivative against the hand-coded connection


def cross_layer(seed=0, samples=100, ns=(3, 4)):
    """Conformal standard tractor connection: algebraic formula against slot formula.

    Inputs are random rationals in an orthonormal frame (g = delta), with
    Rho(X_a) the g_1 element whose covector is -P_a (frozen sign).
    """
    from .conformal.operators import tractor_slots

    rnd = random.Random(seed)
    rows = []
    for n in ns:
        alg = build_algebra("conformal", (n,))
        std = standard_rep(alg)
        ok = True
        for _ in range(samples):
            P = [[Fraction(0)] * n for _ in range(n)]
            for a in range(n):
                for b in range(a, n):
                    P[a][b] = P[b][a] = _rand_q(rnd)
            s, m, r = _rand_q(rnd), [_rand_q(rnd) for _ in range(n)], _rand_q(rnd)
            ds = [_rand_q(rnd) for _ in range(n)]
            dm = [[_rand_q(rnd) for _ in range(n)] for _ in range(n)]
            dr = [_rand_q(rnd) for _ in range(n)]
            for a in range(n):
                xi = conformal_minus(alg, [1 if b == a else 0 for b in range(n)])
                rho_xi = conformal_plus(alg, [-c for c in P[a]])
                v = conformal_standard_vector(n, s, m, r)
                nv = conformal_standard_vector(n, ds[a], dm[a], dr[a])
                got = tractor_derivative_components(std, xi, v, nv, rho_xi).flat()
                g_row = [1 if b == a else 0 for b in range(n)]
                top, mid, bot = tractor_slots(a, g_row, P[a], P[a], s, m, r, ds[a], dm[a], dr[a])
                ok &= conformal_standard_unpack(n, list(got)) == (top, mid, bot)
        rows.append(exact_row("conformal:%d algebraic tractor derivative = slot formula" % n, ok,
                              samples=samples))

    # Grassmannian standard: (nabla v + Rho(xi) w, nabla w + xi v)
    p, q = 2, 3
    alg = build_algebra("grassmannian", (p, q))
    std = standard_rep(alg)
    V, W = list(range(p)), list(range(p, p + q))
    ok = True
    for _ in range(samples):
        X, R = _random_grade(alg, -1, rnd), _random_grade(alg, 1, rnd)
        vec = [_rand_q(rnd) for _ in range(p + q)]
        nv = [_rand_q(rnd) for _ in range(p + q)]
        got = list(tractor_derivative_components(std, X, vec, nv, R).flat())
        x, rr = _block(alg, X, W, V), _block(alg, R, V, W)
        v, w = vec[:p], vec[p:]
        want = ([nv[i] + sum(rr[i][j] * w[j] for j in range(q)) for i in range(p)]
                + [nv[p + i] + sum(x[i][j] * v[j] for j in range(p)) for i in range(q)])
        ok &= got == want
    rows.append(exact_row("grassmannian:2,3 algebraic tractor derivative = twistor formula", ok,
                          samples=samples))
    return rows


# ---------------------------------------------------------------------------
# numeric conformal calculus


def _tol(tols, key):
    return (tols or {}).get(key, DEFAULT_TOLS[key])


def random_conformal_factor(n, rng):
    """A positive polynomial 1 + (a.x)/(2n) + (x^T B x)/(2n^2) with |a|, |B| <= 1.

    Positive wherever |x_i| <= 1/2, since the two corrections stay below 1/4 and 1/8.
    """
    from .conformal.charts import scalar

    a = rng.uniform(-1, 1, n)
    B = rng.uniform(-1, 1, (n, n))
    terms = ["1"]
    terms += ["(%r)*x%d/%d" % (float(a[i]), i, 2 * n) for i in range(n)]
    terms += ["(%r)*x%d*x%d/%d" % (float(B[i, j]), i, j, 2 * n * n) for i in range(n) for j in range(n)]
    return scalar(" + ".join(terms), n)


def _samples(chart, rng, count, half_width=None):
    if half_width is None:
        return chart.sample(rng, count)
    lo = np.maximum(chart.domain[:, 0], -half_width)
    hi = np.minimum(chart.domain[:, 1], half_width)
    return lo + (hi - lo) * rng.random((count, chart.n))


def rescale_suite(chart, seed=0, samples=100, tols=None):
    """Transformation laws at seeded random points under a seeded random rescaling."""
    from .conformal.charts import builtin_chart, rescale, scalar
    from .conformal.rescaling import check_rescale_laws

    rng = np.random.default_rng(seed)
    n = chart.n
    X = _samples(chart, rng, samples, half_width=0.5)
    Omega = random_conformal_factor(n, rng)
    tol = _tol(tols, "rescale")
    rep = check_rescale_laws(chart, Omega, X)
    rows = [tol_row("%s law" % k, v, tol, samples=samples) for k, v in sorted(rep["residuals"].items())]
    trivial = check_rescale_laws(chart, scalar("1", n), X[:5])["residuals"]
    rows.append(tol_row("Omega = 1 leaves everything unchanged", max(trivial.values()), 0.0))
    # flat metric rescaled by 2/(1+|x|^2) is the round sphere
    flat, sph = builtin_chart("flat", n), builtin_chart("sphere", n)
    Om = scalar("2/(1 + %s)" % " + ".join("x%d**2" % i for i in range(n)), n)
    hat = rescale(flat, Om)
    worst = 0.0
    for x in X[:20]:
        a, b = hat.metric_jet(x, 2), sph.metric_jet(x, 2)
        worst = max(worst, *(float(np.max(np.abs(getattr(a, p) - getattr(b, p)))) for p in ("val", "d1", "d2")))
    rows.append(tol_row("flat rescaled by 2/(1+|x|^2) = sphere", worst, 1e-12))
    return rows


def curvature_checks_suite(chart, seed=0, samples=20, tols=None):
    from .conformal.curvature import curvature_suite, metric_compatibility, symmetry_residuals

    rng = np.random.default_rng(seed)
    X = _samples(chart, rng, samples)
    tol = _tol(tols, "curvature")
    n = chart.n
    worst = {}
    model = {}
    for x in X:
        pc = curvature_suite(chart, x)
        r = symmetry_residuals(pc)
        r["metric_compatibility"] = metric_compatibility(chart, x)
        if chart.name == "sphere":
            model["Ric - (n-1) g"] = float(np.max(np.abs(pc.Ric - (n - 1) * pc.g)))
            model["R - n(n-1)"] = abs(pc.R - n * (n - 1))
            model["P - g/2"] = float(np.max(np.abs(pc.P - pc.g / 2)))
            model["Weyl"] = float(np.max(np.abs(pc.W)))
        elif chart.name == "flat":
            model["Riemann"] = float(np.max(np.abs(pc.Riem)))
        for k, v in list(r.items()) + [("model: " + k, v) for k, v in model.items()]:
            worst[k] = max(worst.get(k, 0.0), v)
    rows = [tol_row(k, v, tol, samples=samples) for k, v in sorted(worst.items())]
    val = chart.validate(X[:5])
    rows.append(tol_row("partials agree with central differences", val["max_fd_mismatch"], 1e-5))
    return rows


def bianchi_suite(chart, seed=0, samples=20, tols=None):
    from .conformal_numeric import bianchi_checks

    rng = np.random.default_rng(seed)
    rep = bianchi_checks(chart, _samples(chart, rng, samples))
    tol = _tol(tols, "bianchi")
    return [tol_row(k, v["max"], tol, mean=v["mean"], samples=samples)
            for k, v in sorted(rep["residuals"].items())]


def holonomy_suite(chart, center=None, sides=(0.1, 0.05, 0.025), tols=None):
    """Loop holonomy against side length, with a flat-chart control in the same dimension."""
    from .conformal.charts import builtin_chart
    from .conformal.transport import holonomy_study

    n = chart.n
    center = np.full(n, 0.1) if center is None else np.asarray(center, dtype=float)
    study = holonomy_study(chart, center, sides)
    rows = []
    if chart.name == "poly":
        # generic metric: curvature survives, deviation ~ area
        rows.append(tol_row("poly: holonomy deviation at largest loop (not flat)", study["deviations"][0], 1e-6,
                            below=False, **study))
        rows.append(tol_row("poly: log-log slope about 2", abs(study["slope"] - 2.0), 0.5, **study))
    elif chart.name == "flat":
        rows.append(tol_row("flat: holonomy deviation", max(study["deviations"]), _tol(tols, "flat_holonomy"),
                            **study))
    else:
        rows.append(tol_row("%s: log-log slope" % chart.name, study["slope"], _tol(tols, "holonomy_slope"),
                            below=False, **study))
    if chart.name != "flat":
        flat = holonomy_study(builtin_chart("flat", n), center, sides)
        rows.append(tol_row("flat control: holonomy deviation", max(flat["deviations"]),
                            _tol(tols, "flat_holonomy"), **flat))
    return rows


def transport_suite(chart, seed=0, tols=None):
    """Transport against the flat closed form, plus the RK4 order study and metric conservation."""
    from .conformal.charts import builtin_chart
    from .conformal.curvature import curvature_suite
    from .conformal.operators import tractor_metric
    from .conformal.transport import _loglog_slope, circular_arc, parallel_transport, polyline

    rng = np.random.default_rng(seed)
    n = chart.n
    flat = builtin_chart("flat", n)
    rows = []

    def closed_form(v0, dx):
        s, m, r = v0[0], v0[1:-1], v0[-1]
        return np.concatenate([[s + m @ dx - 0.5 * r * dx @ dx], m - r * dx, [r]])

    worst = 0.0
    for _ in range(5):
        v0 = rng.uniform(-1, 1, n + 2)
        a, b = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
        V = parallel_transport(flat, polyline([a, b]), v0, h=1e-2)
        worst = max(worst, float(np.max(np.abs(V - closed_form(v0, b - a)))))
    rows.append(tol_row("flat: straight transport = closed form", worst, _tol(tols, "transport")))
    Z = parallel_transport(chart, polyline([np.zeros(n), np.full(n, 0.2)]), np.zeros(n + 2))
    rows.append(tol_row("%s: zero tractor stays zero" % chart.name, float(np.max(np.abs(Z))), 0.0))

    # RK4 order along a circular arc (straight flat paths are integrated exactly);
    # h is the step in the curve parameter t in [0, 1]
    arc = circular_arc(np.zeros(n), 1.5, 0.0, 3.0)
    v0 = rng.uniform(-1, 1, n + 2)
    want = closed_form(v0, arc.b - arc.a)
    hs = (1e-2, 5e-3, 2.5e-3)
    errs = [float(np.max(np.abs(parallel_transport(flat, arc, v0, steps=int(round(1 / h))) - want)))
            for h in hs]
    slope = _loglog_slope(hs, errs)
    rows.append(tol_row("flat arc: RK4 convergence order |slope - 4|", abs(slope - 4.0),
                        _tol(tols, "transport_order"), slope=slope, errors=errs, steps=list(hs)))

    # tractor metric is parallel
    pts = [np.zeros(n), np.full(n, 0.3), np.concatenate([[-0.2], np.full(n - 1, 0.25)])]
    v0 = rng.uniform(-1, 1, n + 2)
    V = parallel_transport(chart, polyline(pts), v0, h=1e-3)
    h0 = tractor_metric(curvature_suite(chart, pts[0]).ginv, v0)
    h1 = tractor_metric(curvature_suite(chart, pts[-1]).ginv, V)
    rows.append(tol_row("%s: tractor metric preserved" % chart.name, abs(h1 - h0), _tol(tols, "norm")))
    return rows


def operators_suite(chart, seed=0, samples=20, tols=None):
    """Slot structure of thomas_D and covariance of the invariant operators."""
    from .conformal.charts import scalar
    from .conformal.curvature import curvature_suite, scalar_covariant
    from .conformal.operators import einstein_operator, prolong, thomas_D, yamabe
    from .conformal.rescaling import check_rescale_laws

    rng = np.random.default_rng(seed)
    n = chart.n
    X = _samples(chart, rng, samples, half_width=0.5)
    f = scalar("1 + x0*x1/2 - x%d**3/3 + x1**2/5" % (n - 1), n)
    tol = _tol(tols, "operators")
    w_y = Fraction(2 - n, 2)
    top0 = mid0 = top_y = bottom_y = n_prolong = 0.0
    for x in X:
        g, H, _ = scalar_covariant(f.jet(x, 2), curvature_suite(chart, x).Gamma)
        D0 = thomas_D(chart, f, x, w=0)
        top0 = max(top0, abs(D0.sigma))
        mid0 = max(mid0, float(np.max(np.abs(D0.mu - (n - 2) * g))))
        Dy = thomas_D(chart, f, x, w=w_y)
        top_y = max(top_y, abs(Dy.sigma), float(np.max(np.abs(Dy.mu))))
        # the displayed D has -(Laplacian + w J) in the bottom slot, the negative of Yamabe
        bottom_y = max(bottom_y, abs(Dy.rho + yamabe(chart, f, x)))
        D1 = thomas_D(chart, f, x, w=1)
        n_prolong = max(n_prolong, (D1 - _scaled_tractor(prolong(chart, f, x), n)).norm_inf())
    rows = [
        tol_row("thomas_D w=0: top slot", top0, tol),
        tol_row("thomas_D w=0: middle slot = (n-2) grad f", mid0, tol),
        tol_row("thomas_D w=1-n/2: top two slots", top_y, tol),
        tol_row("thomas_D w=1-n/2: bottom slot = -Yamabe", bottom_y, tol),
        tol_row("thomas_D w=1 = n prolong", n_prolong, tol),
    ]
    Omega = random_conformal_factor(n, rng)
    res = check_rescale_laws(chart, Omega, X)["residuals"]
    for k in ("yamabe", "einstein_operator", "thomas_D"):
        rows.append(tol_row("%s conformal covariance (n=%d)" % (k, n), res[k], _tol(tols, "yamabe")))
    if chart.name == "sphere":
        one = scalar("1", n)
        want = (1 - n / 2) * n / 2
        worst = max(abs(yamabe(chart, one, x) - want) for x in X)
        rows.append(tol_row("sphere: Yamabe of 1 = (1-n/2) n/2 = %g" % want, worst, tol))
        worst = max(float(np.max(np.abs(einstein_operator(chart, one, x)))) for x in X)
        rows.append(tol_row("sphere: Einstein operator of 1", worst, tol))
    if chart.name == "flat":
        worst = 0.0
        for x in X:
            J = f.jet(x, 2)
            worst = max(worst, abs(yamabe(chart, f, x) - float(np.trace(J.d2))))
        rows.append(tol_row("flat: Yamabe = Laplacian", worst, tol))
    return rows


def _scaled_tractor(t, c):
    from .conformal.operators import TractorVec

    return TractorVec(c * t.sigma, c * np.asarray(t.mu), c * t.rho, t.scale, t.weight)


def einstein_suite(chart_kind="sphere", n=3, seed=0, samples=3, tols=None, h=1e-3):
    """Parallel tractors against Einstein scales, in both directions."""
    from .conformal.charts import builtin_chart, scalar
    from .conformal.operators import TractorField, TractorVec, closure_residual, prolong, \
        tractor_connection_apply
    from .conformal.transport import einstein_recover

    rng = np.random.default_rng(seed)
    chart = builtin_chart(chart_kind, n)
    X = _samples(chart, rng, samples, half_width=0.3)
    base = np.zeros(n)
    rows = []
    if chart_kind in ("sphere", "flat"):
        v_one = prolong(chart, scalar("1", n), base)
        rec = einstein_recover(chart, base, v_one, X, h=h)
        dev = max(abs(s - 1.0) for s in rec["sigma"])
        rows.append(tol_row("%s: recovered sigma from prolong(1) is 1" % chart_kind, dev, _tol(tols, "sigma")))
        rows.append(tol_row("%s: Einstein residual of recovered sigma" % chart_kind,
                            rec["max_einstein_residual"], _tol(tols, "einstein"),
                            probe_deviation=rec["probe_deviation"]))
        mu0 = rng.uniform(-0.5, 0.5, n)
        v_cone = TractorVec(1.0, mu0, float(v_one.rho))
        rec = einstein_recover(chart, base, v_cone, X, h=h, probe=False)
        spread = max(rec["sigma"]) - min(rec["sigma"])
        rows.append(tol_row("%s: recovered sigma with mu0 != 0 is not constant" % chart_kind, spread, 1e-3,
                            below=False))
        rows.append(tol_row("%s: Einstein residual with mu0 != 0" % chart_kind,
                            rec["max_einstein_residual"], _tol(tols, "einstein")))
    # forward direction and closure on the frozen Einstein scales
    sols = load_fixture("einstein_solutions.json")["solutions"]
    par = clo = 0.0
    count = 0
    for sol in sols:
        ch = builtin_chart(sol["chart"], sol["n"])
        sig = scalar(sol["sigma"], sol["n"])
        P = _samples(ch, rng, 10, half_width=1.0)
        T = TractorField.prolonged(ch, sig)
        for x in P:
            for a in range(ch.n):
                par = max(par, tractor_connection_apply(ch, T, a, x).norm_inf())
        clo = max(clo, closure_residual(ch, sig, P)["max"])
        count += 1
    rows.append(tol_row("fixtures: prolonged Einstein scales are parallel", par, _tol(tols, "parallel"),
                        fixtures=count))
    rows.append(tol_row("fixtures: closure residual", clo, _tol(tols, "closure"), fixtures=count))
    return rows

"""
Builders for every frozen fixture file.

Each builder is deterministic, so ``tractorlab fixtures --force`` rewrites
the shipped files byte for byte.  Convention constants are computed here from
the exact algebra code rather than typed in, and the tests compare the frozen
files against fresh builds.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .cohomology import count_irreducibles
from .lie_core import adjoint_rep, build_algebra, duality_scale, natural_pairing
from .parabolic_models import (codifferential_as_trace, conformal_minus, conformal_plus,
                               curvature_cochain, normalize_rho, rho_from_matrix, rho_matrix,
                               rho_shift, round_sphere_riemann)

POLY_SEED = 20240611


def build_poly_metric() -> dict:
    """Sparse polynomial perturbation of the flat metric for n = 3, 4."""
    rnd = random.Random(POLY_SEED)
    metrics = {}
    for n in (3, 4):
        terms = []
        for i in range(n):
            for j in range(i, n):
                for deg in (1, 2, 3):
                    monos = [e for e in itertools.product(range(4), repeat=n) if sum(e) == deg]
                    for e in rnd.sample(monos, 2):
                        c = Fraction(rnd.choice([-3, -2, -1, 1, 2, 3]), rnd.choice([20, 30, 40]))
                        terms.append({"i": i, "j": j, "exponents": list(e), "coeff": str(c)})
        metrics[str(n)] = {"domain": [[-0.5, 0.5]] * n, "terms": terms}
    return {
        "description": ("Polynomial perturbation g = delta + sum coeff * x^exponents "
                        "(symmetrized in i, j). Frozen; generated once with seed %d." % POLY_SEED),
        "metrics": metrics,
    }


def _scalar_multiple(M, base):
    """The q with M = q * base, or None."""
    q = None
    for row_m, row_b in zip(M, base):
        for m, b in zip(row_m, row_b):
            if b == 0:
                if m != 0:
                    return None
                continue
            r = Fraction(m) / Fraction(b)
            if q is None:
                q = r
            elif r != q:
                return None
    return q


def _rho_sign(n) -> Fraction:
    alg = build_algebra("conformal", (n,))
    Rho = rho_matrix(alg, normalize_rho(alg, curvature_cochain(alg, round_sphere_riemann(n))))
    half_g = [[Fraction(1, 2) if a == b else Fraction(0) for b in range(n)] for a in range(n)]
    return _scalar_multiple(Rho, half_g)


def _trace_multiple(n) -> Fraction:
    alg = build_algebra("conformal", (n,))
    T = codifferential_as_trace(alg, curvature_cochain(alg, round_sphere_riemann(n)))
    ric = [[Fraction(n - 1) if a == b else Fraction(0) for b in range(n)] for a in range(n)]
    return _scalar_multiple(T, ric)


def _rho_shift_ratio(n=3, samples=20, seed=7) -> Fraction:
    """Ratio of the natural pairing <rho_shift(U, xi), eta> to
    U(xi)U(eta) - 1/2 |U|^2 g(xi, eta)."""
    alg = build_algebra("conformal", (n,))
    rnd = random.Random(seed)
    zero_rho = rho_from_matrix(alg, [[0] * n for _ in range(n)])
    ratio = None
    for _ in range(samples):
        u, x, y = ([Fraction(rnd.randint(-9, 9), rnd.randint(1, 5)) for _ in range(n)] for _ in range(3))
        val = rho_shift(alg, conformal_plus(alg, u), conformal_minus(alg, x),
                        [Fraction(0)] * alg.dim, zero_rho)
        got = natural_pairing(alg, val, conformal_minus(alg, y))
        dot = lambda a, b: sum(p * q for p, q in zip(a, b))
        ref = dot(u, x) * dot(u, y) - Fraction(1, 2) * dot(u, u) * dot(x, y)
        if ref == 0:
            continue
        r = got / ref
        if ratio is not None and r != ratio:
            raise AssertionError("rho_shift is not a fixed multiple of the reference form")
        ratio = r
    return ratio


def build_conventions() -> dict:
    rho_signs = {str(n): str(_rho_sign(n)) for n in (3, 4, 5)}
    traces = {str(n): str(_trace_multiple(n)) for n in (3, 4, 5)}
    for table in (rho_signs, traces):
        if len(set(table.values())) != 1:
            raise AssertionError("convention constant depends on n: %s" % table)
    alg4 = build_algebra("conformal", (4,))
    return {
        "rho_equals_minus_schouten": {
            "multiple_of_schouten": rho_signs["3"],
            "checked_for_n": [3, 4, 5],
            "note": ("normalize_rho on the unit round sphere gives Rho = -P with P = g/2. "
                     "The opposite embedding of g_1 (transposed matrices) flips the sign to +P."),
        },
        "codifferential_trace_multiple": {
            "multiple_of_ricci": traces["3"],
            "checked_for_n": [3, 4, 5],
        },
        "rho_shift_quadratic": {
            "ratio_to_reference": str(_rho_shift_ratio()),
            "reference": "U(xi) U(eta) - 1/2 |U|^2 g(xi, eta)",
            "pairing": "natural pairing: trace form divided by duality_scale",
            "duality_scale": str(duality_scale(build_algebra("conformal", (3,)))),
        },
        "conformal_irreducible_count": {
            "n": 4, "degree": 2, "rep": "adjoint",
            "count": count_irreducibles(alg4, adjoint_rep(alg4), 2),
        },
        "flat_tractor_transport": {
            "closed_form": "(s + m.dx - r |dx|^2 / 2, m - r dx, r)",
            "tractor_metric": "2 sigma rho + |mu|^2",
        },
    }


def build_einstein_solutions() -> dict:
    """Closed-form Einstein scales used for closure and parallelism checks.

    On the round sphere Omega^2 delta with Omega = 2/(1+|x|^2), the scales are
    Omega times a flat-chart Einstein scale a + b.x + c|x|^2.
    """
    return {
        "solutions": [
            {"chart": "sphere", "n": 3, "sigma": "1"},
            {"chart": "sphere", "n": 4, "sigma": "1"},
            {"chart": "sphere", "n": 3,
             "sigma": "2*(1 + x0/2 - (x0**2 + x1**2 + x2**2)/3)/(1 + x0**2 + x1**2 + x2**2)"},
            {"chart": "sphere", "n": 4,
             "sigma": "2*(3 - x1 + x3/4 + (x0**2 + x1**2 + x2**2 + x3**2))/(1 + x0**2 + x1**2 + x2**2 + x3**2)"},
            {"chart": "flat", "n": 3, "sigma": "1 + x0**2 + x1**2 + x2**2"},
            {"chart": "flat", "n": 4, "sigma": "2 + x0 - x3/3 + (x0**2 + x1**2 + x2**2 + x3**2)/5"},
        ],
    }


BUILDERS = {
    "poly_metric.json": build_poly_metric,
    "conventions.json": build_conventions,
    "einstein_solutions.json": build_einstein_solutions,
}

"""
Conformally invariant operators on densities and the standard tractor
connection, evaluated in the scale of a chart.

Numeric tractors are stored in slot order (sigma, mu_1, ..., mu_n, rho) with
mu a covector in chart coordinates.  In the chart's own scale a density is
a plain function.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .charts import DensityField, MetricChart, ScalarField
from .curvature import connection_jet, curvature_suite, gamma_and_schouten_batch, scalar_covariant


@dataclass(frozen=True)
class TractorVec:
    sigma: float
    mu: np.ndarray
    rho: float
    scale: str = "g"
    weight: Fraction = Fraction(0)

    @classmethod
    def from_array(cls, v, scale="g", weight=0):
        v = np.asarray(v, dtype=float)
        return cls(float(v[0]), v[1:-1].copy(), float(v[-1]), scale, Fraction(weight))

    def array(self):
        return np.concatenate([[self.sigma], self.mu, [self.rho]])

    @property
    def n(self):
        return len(self.mu)

    def __sub__(self, other):
        return TractorVec.from_array(self.array() - other.array(), self.scale, self.weight)

    def norm_inf(self):
        return float(np.max(np.abs(self.array())))


def tractor_metric(ginv, v) -> float:
    """h(V, V) = 2 sigma rho + g^{ab} mu_a mu_b."""
    v = np.asarray(v, dtype=float)
    mu = v[1:-1]
    return float(2 * v[0] * v[-1] + mu @ ginv @ mu)


def _trace_free(T, g, ginv):
    return T - np.einsum("ab,ab->", ginv, T) / g.shape[0] * g


def _density_data(chart, f, x, order):
    field_ = f.field if isinstance(f, DensityField) else f
    return field_.jet(x, order)


def einstein_operator(chart: MetricChart, sigma, x) -> np.ndarray:
    """Trace-free part of nabla_a nabla_b sigma + P_ab sigma."""
    x = chart.check_point(x)
    pc = curvature_suite(chart, x)
    sj = _density_data(chart, sigma, x, 2)
    _, H, _ = scalar_covariant(sj, pc.Gamma)
    T = H + pc.P * float(sj.val)
    T = 0.5 * (T + T.T)
    return _trace_free(T, pc.g, pc.ginv)


def prolong(chart: MetricChart, sigma, x) -> TractorVec:
    """(sigma, nabla_a sigma, -(1/n)(Laplacian sigma + J sigma))."""
    x = chart.check_point(x)
    n = chart.n
    pc = curvature_suite(chart, x)
    sj = _density_data(chart, sigma, x, 2)
    grad, H, _ = scalar_covariant(sj, pc.Gamma)
    s = float(sj.val)
    rho = -(np.einsum("ab,ab->", pc.ginv, H) + pc.J * s) / n
    return TractorVec(s, grad.copy(), float(rho), weight=Fraction(1))


def _prolong_with_gradient(chart, sigma, x):
    """prolong(sigma) and the partial derivatives of its three slots."""
    n = chart.n
    pc = curvature_suite(chart, x, derivatives=True)
    cj = connection_jet(chart, x, 1)
    sj = _density_data(chart, sigma, x, 3)
    grad, H, T = scalar_covariant(sj, cj.Gamma, cj.dGamma)
    s = float(sj.val)
    lap = np.einsum("ab,ab->", pc.ginv, H)
    rho = -(lap + pc.J * s) / n
    # d_c (Laplacian sigma) = g^{ab} nabla_c nabla_a nabla_b sigma
    dlap = np.einsum("ab,cab->c", pc.ginv, T)
    drho = -(dlap + pc.dJ * s + pc.J * grad) / n
    dmu = sj.d2  # d_a mu_b = d_a d_b sigma, symmetric
    return TractorVec(s, grad.copy(), float(rho), weight=Fraction(1)), (grad, dmu, drho), pc


def closure_residual(chart: MetricChart, sigma, samples) -> dict:
    """max over samples of |nabla_c rho - P_c^a mu_a| with (mu, rho) from prolong."""
    worst = 0.0
    vals = []
    for x in samples:
        x = chart.check_point(x)
        t, (_, _, drho), pc = _prolong_with_gradient(chart, sigma, x)
        r = drho - pc.P @ pc.ginv @ t.mu
        v = float(np.max(np.abs(r)))
        vals.append(v)
        worst = max(worst, v)
    return {"max": worst, "mean": float(np.mean(vals)) if vals else 0.0, "samples": len(vals)}


def thomas_D(chart: MetricChart, f, x, w=None) -> TractorVec:
    """((n+2w-2) w f, (n+2w-2) nabla_a f, -(Laplacian f + w J f)) for f of weight w."""
    if w is None:
        if not isinstance(f, DensityField):
            raise ValueError("weight required for a plain scalar field")
        w = f.weight
    w = Fraction(w)
    x = chart.check_point(x)
    n = chart.n
    pc = curvature_suite(chart, x)
    fj = _density_data(chart, f, x, 2)
    grad, H, _ = scalar_covariant(fj, pc.Gamma)
    c = float(n + 2 * w - 2)
    fv = float(fj.val)
    lap = np.einsum("ab,ab->", pc.ginv, H)
    return TractorVec(c * float(w) * fv, c * grad, float(-(lap + float(w) * pc.J * fv)), weight=w - 1)


def yamabe(chart: MetricChart, f, x) -> float:
    """Laplacian f + (1 - n/2) J f."""
    x = chart.check_point(x)
    n = chart.n
    pc = curvature_suite(chart, x)
    fj = _density_data(chart, f, x, 2)
    _, H, _ = scalar_covariant(fj, pc.Gamma)
    return float(np.einsum("ab,ab->", pc.ginv, H) + (1 - n / 2) * pc.J * float(fj.val))


# ---------------------------------------------------------------------------
# tractor connection


@dataclass(frozen=True)
class TractorField:
    """A tractor field given by an evaluator returning slot values and their
    first partials: (sigma, d sigma, mu, d mu, rho, d rho) with
    dmu[a, b] = d_a mu_b."""

    evaluate: Callable

    @classmethod
    def prolonged(cls, chart, sigma):
        def ev(x):
            t, (ds, dmu, drho), _ = _prolong_with_gradient(chart, sigma, x)
            return t.sigma, ds, t.mu, dmu, t.rho, drho
        return cls(ev)

    @classmethod
    def constant_flat(cls, sigma0, mu0, rho0, base):
        """The parallel field of the flat chart through (sigma0, mu0, rho0) at base."""
        mu0 = np.asarray(mu0, dtype=float)
        base = np.asarray(base, dtype=float)

        def ev(x):
            dx = np.asarray(x, dtype=float) - base
            s = sigma0 + mu0 @ dx - 0.5 * rho0 * dx @ dx
            ds = mu0 - rho0 * dx
            mu = mu0 - rho0 * dx
            dmu = -rho0 * np.eye(len(mu0))
            return s, ds, mu, dmu, rho0, np.zeros(len(mu0))
        return cls(ev)

    @classmethod
    def zero(cls, n):
        def ev(x):
            z = np.zeros(n)
            return 0.0, z, z.copy(), np.zeros((n, n)), 0.0, z.copy()
        return cls(ev)

    def scaled(self, f: ScalarField):
        """The field f * T (Leibniz test helper)."""
        def ev(x):
            s, ds, mu, dmu, r, dr = self.evaluate(x)
            fj = f.jet(x, 1)
            fv, df = float(fj.val), fj.d1
            return (fv * s, df * s + fv * ds, fv * mu, np.outer(df, mu) + fv * dmu,
                    fv * r, df * r + fv * dr)
        return TractorField(ev)


def tractor_slots(a, g_row, P_row, Pmixed_row, sigma, mu, rho, dsigma_a, nabla_mu_a, drho_a):
    """The hand-coded standard tractor connection in direction a:

        (nabla_a sigma - mu_a, nabla_a mu_b + g_ab rho + P_ab sigma, nabla_a rho - P_a^b mu_b)

    Arguments are rows in direction a; works with floats or exact rationals.
    """
    top = dsigma_a - mu[a]
    mid = [nabla_mu_a[b] + g_row[b] * rho + P_row[b] * sigma for b in range(len(mu))]
    bot = drho_a - sum(Pmixed_row[b] * mu[b] for b in range(len(mu)))
    return top, mid, bot


def tractor_connection_apply(chart: MetricChart, field: TractorField, a: int, x) -> TractorVec:
    x = chart.check_point(x)
    pc = curvature_suite(chart, x)
    s, ds, mu, dmu, r, dr = field.evaluate(x)
    mu = np.asarray(mu, dtype=float)
    nabla_mu = np.asarray(dmu, dtype=float)[a] - pc.Gamma[:, a, :].T @ mu
    Pm = pc.P_mixed
    top, mid, bot = tractor_slots(a, pc.g[a], pc.P[a], Pm[a], s, mu, r, ds[a], nabla_mu, dr[a])
    return TractorVec(float(top), np.array(mid, dtype=float), float(bot))


def connection_matrix(pc, a) -> np.ndarray:
    """A_a with nabla_a V = d_a V + A_a V in slot order (sigma, mu, rho)."""
    n = pc.n
    A = np.zeros((n + 2, n + 2))
    A[0, 1 + a] = -1.0
    A[1:n + 1, 0] = pc.P[a]
    A[1:n + 1, 1:n + 1] = -pc.Gamma[:, a, :].T
    A[1:n + 1, n + 1] = pc.g[a]
    A[n + 1, 1:n + 1] = -pc.P_mixed[a]
    return A


def connection_matrices(chart, x) -> np.ndarray:
    pc = curvature_suite(chart, x)
    return np.stack([connection_matrix(pc, a) for a in range(chart.n)])


def connection_matrices_batch(chart, X) -> np.ndarray:
    """A_a at each row of X, shape (B, n, n+2, n+2)."""
    g, ginv, Gamma, P = gamma_and_schouten_batch(chart, X)
    B, n = g.shape[0], chart.n
    Pm = np.einsum("zac,zcb->zab", P, ginv)
    A = np.zeros((B, n, n + 2, n + 2))
    for a in range(n):
        A[:, a, 0, 1 + a] = -1.0
        A[:, a, 1:n + 1, 0] = P[:, a, :]
        A[:, a, 1:n + 1, 1:n + 1] = -np.swapaxes(Gamma[:, :, a, :], 1, 2)
        A[:, a, 1:n + 1, n + 1] = g[:, a, :]
        A[:, a, n + 1, 1:n + 1] = -Pm[:, a, :]
    return A

"""
Metric charts and scalar fields with analytic partials up to order 3.

Built-in charts come from closed-form sympy expressions whose derivative
arrays are generated once and lambdified.  Callers may implement their own
chart by subclassing :class:`MetricChart` and providing ``metric_jet``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import sympy as sp

from ..fixtures import load_fixture
from .jets import Jet, power, scalar_times


class DomainError(ValueError):
    pass


class ChartError(ValueError):
    pass


def coordinate_symbols(n):
    return sp.symbols("x0:%d" % n, real=True)


def _derivative_stack(expr_array, xs, order):
    """[A, dA, d2A, d3A] as sympy Arrays with derivative axes trailing."""
    out = [sp.Array(expr_array)]
    for _ in range(order):
        D = sp.derive_by_array(out[-1], xs)  # new derivative axis first
        rank = len(D.shape)
        perm = list(range(1, rank)) + [0]
        out.append(sp.permutedims(D, perm))
    return out


class _Lambdified:
    """Lazily compiled numeric evaluators for an expression array and its partials."""

    def __init__(self, expr, xs):
        self.expr = sp.Array(expr)
        self.xs = xs
        self._funcs = {}
        self.shape = self.expr.shape

    def func(self, k):
        if k not in self._funcs:
            A = _derivative_stack(self.expr, self.xs, k)[k]
            flat = [A[idx] for idx in np.ndindex(*A.shape)] if A.shape else [A]
            f = sp.lambdify(self.xs, flat, "numpy", cse=True)
            self._funcs[k] = (f, A.shape)
        return self._funcs[k]

    def eval(self, x, k):
        f, shape = self.func(k)
        vals = np.array([float(v) for v in f(*x)], dtype=float)
        return vals.reshape(shape)

    def eval_batch(self, X, k):
        """Values at each row of X, shape (len(X),) + array shape."""
        f, shape = self.func(k)
        B = X.shape[0]
        cols = f(*X.T)
        out = np.empty((B, len(cols)))
        for i, c in enumerate(cols):
            out[:, i] = c  # constants broadcast
        return out.reshape((B,) + tuple(shape))


class MetricChart:
    """A coordinate chart with a Riemannian metric.

    Subclasses implement ``_metric_jet(x, order)``; ``metric_jet`` adds the
    domain check.
    """

    name = "chart"

    def __init__(self, n: int, domain: Sequence):
        if n < 3:
            raise ChartError("charts need dimension n >= 3")
        self.n = n
        self.domain = np.array(domain, dtype=float).reshape(n, 2)

    def in_domain(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.domain[:, 0] - 1e-15) and np.all(x <= self.domain[:, 1] + 1e-15))

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DomainError("point of shape %s in a %d-dimensional chart" % (x.shape, self.n))
        if not self.in_domain(x):
            raise DomainError("point %s outside the chart domain" % (x.tolist(),))
        return x

    def metric_jet(self, x, order=2) -> Jet:
        return self._metric_jet(self.check_point(x), order)

    def _metric_jet(self, x, order):
        raise NotImplementedError

    def metric_jet_batch(self, X, order=2) -> Jet:
        """Jets at many points; the arrays gain a leading batch axis."""
        X = np.asarray(X, dtype=float)
        for x in X:
            self.check_point(x)
        return self._metric_jet_batch(X, order)

    def _metric_jet_batch(self, X, order):
        jets = [self._metric_jet(x, order) for x in X]
        parts = [np.stack([getattr(j, a) for j in jets]) for a in ("val", "d1", "d2", "d3")[:order + 1]]
        return Jet(*parts)

    def metric(self, x):
        return self.metric_jet(x, 0).val

    def sample(self, rng, count, margin=0.1):
        lo = self.domain[:, 0] + margin * (self.domain[:, 1] - self.domain[:, 0])
        hi = self.domain[:, 1] - margin * (self.domain[:, 1] - self.domain[:, 0])
        return lo + (hi - lo) * rng.random((count, self.n))

    def validate(self, samples, h=1e-4, rtol=1e-5) -> dict:
        """Check the metric is symmetric positive definite and its partials match central differences."""
        worst_sym = 0.0
        worst_fd = 0.0
        for x in samples:
            J = self.metric_jet(x, 3)
            worst_sym = max(worst_sym, float(np.max(np.abs(J.val - J.val.T))))
            try:
                np.linalg.cholesky(J.val)
            except np.linalg.LinAlgError:
                raise ChartError("metric not positive definite at %s" % (np.asarray(x).tolist(),)) from None
            for k in range(self.n):
                e = np.zeros(self.n)
                e[k] = h
                if not (self.in_domain(x + e) and self.in_domain(x - e)):
                    continue
                Jp, Jm = self.metric_jet(x + e, 2), self.metric_jet(x - e, 2)
                for lo, hi, lo_m in ((J.d1, Jp.val, Jm.val), (J.d2, Jp.d1, Jm.d1), (J.d3, Jp.d2, Jm.d2)):
                    fd = (hi - lo_m) / (2 * h)
                    an = lo[..., k]
                    scale = 1.0 + float(np.max(np.abs(an)))
                    worst_fd = max(worst_fd, float(np.max(np.abs(fd - an))) / scale)
        if worst_sym > 0:
            raise ChartError("metric not symmetric (%.3g)" % worst_sym)
        if worst_fd > rtol:
            raise ChartError("supplied partials disagree with finite differences (%.3g)" % worst_fd)
        return {"max_asymmetry": worst_sym, "max_fd_mismatch": worst_fd, "samples": len(samples)}


class SymbolicChart(MetricChart):
    def __init__(self, name, n, domain, g_expr, xs=None, spec=None):
        super().__init__(n, domain)
        self.name = name
        self.xs = xs if xs is not None else coordinate_symbols(n)
        self.g_expr = sp.Matrix(g_expr)
        if self.g_expr.shape != (n, n) or self.g_expr != self.g_expr.T:
            raise ChartError("metric expression must be a symmetric %dx%d matrix" % (n, n))
        self._lam = _Lambdified(self.g_expr.tolist(), self.xs)
        self.spec = spec or {"chart": name, "n": n, "domain": self.domain.tolist()}

    def _metric_jet(self, x, order):
        parts = [self._lam.eval(x, k) for k in range(order + 1)]
        return Jet(*parts)

    def _metric_jet_batch(self, X, order):
        return Jet(*[self._lam.eval_batch(X, k) for k in range(order + 1)])


# ---------------------------------------------------------------------------
# scalar fields


class ScalarField:
    """A scalar function with partials to order 3."""

    def jet(self, x, order=2) -> Jet:
        raise NotImplementedError

    def __call__(self, x):
        return float(self.jet(x, 0).val)


class SymbolicScalar(ScalarField):
    def __init__(self, expr, n, xs=None):
        self.n = n
        self.xs = xs if xs is not None else coordinate_symbols(n)
        self.expr = sp.sympify(expr)
        self._lam = _Lambdified(self.expr, self.xs)

    def jet(self, x, order=2):
        x = np.asarray(x, dtype=float)
        return Jet(*[self._lam.eval(x, k) for k in range(order + 1)])

    def __repr__(self):
        return "SymbolicScalar(%s)" % self.expr


class ProductScalar(ScalarField):
    def __init__(self, f: ScalarField, g: ScalarField):
        self.f, self.g = f, g

    def jet(self, x, order=2):
        return scalar_times(self.f.jet(x, order), self.g.jet(x, order), order)


class PowerScalar(ScalarField):
    def __init__(self, f: ScalarField, p):
        self.f, self.p = f, float(p)

    def jet(self, x, order=2):
        J = self.f.jet(x, order)
        if float(J.val) <= 0:
            raise DomainError("power of a nonpositive function")
        return power(J, self.p, order)


def scalar(expr, n) -> SymbolicScalar:
    """Scalar field from a sympy expression or string in x0..x{n-1}."""
    if isinstance(expr, str):
        expr = sp.sympify(expr, locals={str(s): s for s in coordinate_symbols(n)})
    return SymbolicScalar(expr, n)


class DensityField:
    """A weight-w density stored as a plain function in a named scale.

    Changing to the scale Omega^2 g multiplies the function by Omega^w.
    """

    def __init__(self, weight, field: ScalarField, scale="g"):
        self.weight = Fraction(weight)
        self.field = field
        self.scale = scale

    def jet(self, x, order=2):
        return self.field.jet(x, order)

    def rescale(self, Omega: ScalarField, scale_tag="g_hat"):
        if float(self.weight) == 0:
            return DensityField(self.weight, self.field, scale_tag)
        return DensityField(self.weight, ProductScalar(PowerScalar(Omega, float(self.weight)), self.field),
                            scale_tag)


# ---------------------------------------------------------------------------
# built-in charts


def flat_chart(n, half_width=10.0) -> SymbolicChart:
    return SymbolicChart("flat", n, [(-half_width, half_width)] * n, sp.eye(n))


def sphere_chart(n, half_width=2.0) -> SymbolicChart:
    """Unit round sphere in stereographic coordinates, g = 4/(1+|x|^2)^2 delta."""
    xs = coordinate_symbols(n)
    r2 = sum(x ** 2 for x in xs)
    return SymbolicChart("sphere", n, [(-half_width, half_width)] * n, 4 / (1 + r2) ** 2 * sp.eye(n), xs)


def poly_metric_expr(n, coeffs=None):
    """delta + sum of frozen monomial perturbations (symmetrized)."""
    if coeffs is None:
        doc = load_fixture("poly_metric.json")
        if str(n) not in doc["metrics"]:
            raise ChartError("no frozen polynomial metric for n=%d" % n)
        coeffs = doc["metrics"][str(n)]["terms"]
    xs = coordinate_symbols(n)
    G = sp.zeros(n, n)
    for t in coeffs:
        i, j = t["i"], t["j"]
        mono = sp.Integer(1)
        for x, e in zip(xs, t["exponents"]):
            mono *= x ** e
        c = sp.Rational(t["coeff"])
        G[i, j] += c * mono
        if i != j:
            G[j, i] += c * mono
    return sp.eye(n) + G, xs


def poly_chart(n, coeffs=None) -> SymbolicChart:
    G, xs = poly_metric_expr(n, coeffs)
    domain = None
    if coeffs is None:
        domain = load_fixture("poly_metric.json")["metrics"][str(n)]["domain"]
    domain = domain or [[-0.5, 0.5]] * n
    return SymbolicChart("poly", n, domain, G, xs)


@lru_cache(maxsize=32)
def _cached_chart(kind, n):
    if kind == "flat":
        return flat_chart(n)
    if kind == "sphere":
        return sphere_chart(n)
    if kind == "poly":
        return poly_chart(n)
    raise ChartError("unknown chart kind %r" % (kind,))


def builtin_chart(kind: str, n: int) -> MetricChart:
    """Shared, cached built-in chart (compiled evaluators are reused)."""
    return _cached_chart(kind, int(n))


def chart_from_spec(spec) -> MetricChart:
    """Chart from its JSON specification {"chart", "n", "domain", "poly_coeffs"}."""
    if isinstance(spec, str):
        spec = json.loads(spec)
    kind = spec.get("chart")
    n = spec.get("n")
    if not isinstance(n, int):
        raise ChartError("chart spec needs an integer 'n'")
    if kind == "poly" and spec.get("poly_coeffs") is not None:
        ch = poly_chart(n, spec["poly_coeffs"])
    else:
        ch = builtin_chart(kind, n)
    if spec.get("domain") is not None:
        dom = np.array(spec["domain"], dtype=float).reshape(n, 2)
        if np.any(dom[:, 0] >= dom[:, 1]):
            raise ChartError("empty domain box")
        ch = SymbolicChart(ch.name, n, dom, ch.g_expr, ch.xs)
    return ch


class RescaledChart(MetricChart):
    """The chart with metric Omega^2 g, partials composed by Leibniz' rule."""

    def __init__(self, base: MetricChart, Omega: ScalarField):
        super().__init__(base.n, base.domain)
        self.base = base
        self.Omega = Omega
        self.name = "%s*Omega^2" % base.name
        self._W = PowerScalar(Omega, 2)

    def _metric_jet(self, x, order):
        return scalar_times(self._W.jet(x, order), self.base.metric_jet(x, order), order)


def rescale(chart: MetricChart, Omega: ScalarField, samples=None) -> RescaledChart:
    """ĝ = Omega^2 g.  Omega is checked for positivity on the given samples."""
    if samples is not None:
        for x in samples:
            if Omega(x) <= 0:
                raise DomainError("conformal factor not positive at %s" % (np.asarray(x).tolist(),))
    return RescaledChart(chart, Omega)


def upsilon(Omega: ScalarField, x) -> np.ndarray:
    """Upsilon_a = Omega^{-1} d_a Omega."""
    J = Omega.jet(x, 1)
    if float(J.val) <= 0:
        raise DomainError("conformal factor not positive")
    return J.d1 / float(J.val)

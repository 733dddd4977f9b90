"""
Parallel transport of standard tractors by fixed-step RK4, loop holonomy,
and recovery of Einstein scales from parallel tractors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .charts import DomainError, MetricChart
from .operators import TractorVec, connection_matrices_batch, einstein_operator


class NotFlat(RuntimeError):
    """The tractor connection failed the flatness probe near the base point."""


@dataclass(frozen=True)
class Segment:
    """Straight coordinate path from a to b, parameter t in [0, 1]."""

    a: np.ndarray
    b: np.ndarray

    def point(self, t):
        return self.a + t * (self.b - self.a)

    def velocity(self, t):
        return self.b - self.a

    @property
    def length(self):
        return float(np.linalg.norm(self.b - self.a))


@dataclass(frozen=True)
class Curve:
    """A path given by its position and velocity on t in [0, 1]."""

    point: Callable
    velocity: Callable
    length: float

    @property
    def a(self):
        return np.asarray(self.point(0.0), dtype=float)

    @property
    def b(self):
        return np.asarray(self.point(1.0), dtype=float)


def circular_arc(center, radius, angle0, angle1, plane=(0, 1)) -> Curve:
    c = np.asarray(center, dtype=float)
    i, j = plane
    span = angle1 - angle0

    def point(t):
        th = angle0 + span * t
        p = c.copy()
        p[i] += radius * np.cos(th)
        p[j] += radius * np.sin(th)
        return p

    def velocity(t):
        th = angle0 + span * t
        v = np.zeros_like(c)
        v[i] = -radius * span * np.sin(th)
        v[j] = radius * span * np.cos(th)
        return v

    return Curve(point, velocity, abs(radius * span))


def polyline(points) -> list:
    pts = [np.asarray(p, dtype=float) for p in points]
    return [Segment(p, q) for p, q in zip(pts[:-1], pts[1:])]


def square_loop(center, side, plane=(0, 1)) -> list:
    c = np.asarray(center, dtype=float)
    i, j = plane
    h = side / 2
    corners = []
    for di, dj in ((-h, -h), (h, -h), (h, h), (-h, h), (-h, -h)):
        p = c.copy()
        p[i] += di
        p[j] += dj
        corners.append(p)
    return polyline(corners)


def _rhs_batch(chart, starts, deltas, t, V):
    X = starts + t * deltas
    for x in X:
        if not chart.in_domain(x):
            raise DomainError("transport left the chart domain at %s" % (x.tolist(),))
    A = connection_matrices_batch(chart, X)
    Adot = np.einsum("za,zaij->zij", deltas, A)
    return -np.einsum("zij,zj...->zi...", Adot, V)


def transport_batch(chart, starts, ends, V, steps: int):
    """RK4 with ``steps`` equal steps along many straight segments at once.

    V has shape (B, n+2) or (B, n+2, m); row z is carried from starts[z]
    to ends[z].
    """
    starts = np.asarray(starts, dtype=float)
    deltas = np.asarray(ends, dtype=float) - starts
    V = np.array(V, dtype=float)
    dt = 1.0 / steps
    for k in range(steps):
        t = k * dt
        k1 = _rhs_batch(chart, starts, deltas, t, V)
        k2 = _rhs_batch(chart, starts, deltas, t + dt / 2, V + dt / 2 * k1)
        k3 = _rhs_batch(chart, starts, deltas, t + dt / 2, V + dt / 2 * k2)
        k4 = _rhs_batch(chart, starts, deltas, t + dt, V + dt * k3)
        V = V + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return V


def transport_segment(chart, seg: Segment, V, steps: int):
    """RK4 with ``steps`` equal steps along one segment.  V may be a vector or
    a matrix whose columns are transported together."""
    return transport_batch(chart, seg.a[None], seg.b[None], np.asarray(V, dtype=float)[None], steps)[0]


def _curve_rhs(chart, curve, t, V):
    x = np.asarray(curve.point(t), dtype=float)
    if not chart.in_domain(x):
        raise DomainError("transport left the chart domain at %s" % (x.tolist(),))
    A = connection_matrices_batch(chart, x[None])[0]
    return -np.einsum("a,aij,j...->i...", curve.velocity(t), A, V)


def transport_curve(chart, curve: Curve, V, steps: int):
    """RK4 along a general parameterized curve."""
    V = np.array(V, dtype=float)
    dt = 1.0 / steps
    for k in range(steps):
        t = k * dt
        k1 = _curve_rhs(chart, curve, t, V)
        k2 = _curve_rhs(chart, curve, t + dt / 2, V + dt / 2 * k1)
        k3 = _curve_rhs(chart, curve, t + dt / 2, V + dt / 2 * k2)
        k4 = _curve_rhs(chart, curve, t + dt, V + dt * k3)
        V = V + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return V


def _steps_for(seg, h):
    return max(1, int(np.ceil(seg.length / h - 1e-12)))


def parallel_transport(chart: MetricChart, curve, v0, h=1e-2, steps=None):
    """Transport v0 along a path (a Segment, a Curve, or a list of them) with RK4 step about h.

    ``steps`` overrides the per-segment step count.  Returns a TractorVec
    when given one, otherwise the raw array.
    """
    segs = [curve] if isinstance(curve, (Segment, Curve)) else list(curve)
    is_tv = isinstance(v0, TractorVec)
    V = v0.array() if is_tv else np.asarray(v0, dtype=float)
    for seg in segs:
        chart.check_point(seg.a)
        chart.check_point(seg.b)
        move = transport_curve if isinstance(seg, Curve) else transport_segment
        V = move(chart, seg, V, steps or _steps_for(seg, h))
    return TractorVec.from_array(V, v0.scale, v0.weight) if is_tv else V


def holonomy_loop(chart: MetricChart, loop, h=None, steps_per_side=4) -> np.ndarray:
    """Transport matrix around a closed loop (columns: images of basis tractors)."""
    segs = list(loop)
    if np.max(np.abs(segs[0].a - segs[-1].b)) > 1e-12:
        raise ValueError("loop is not closed")
    I = np.eye(chart.n + 2)
    if h is not None:
        return parallel_transport(chart, segs, I, h=h)
    return parallel_transport(chart, segs, I, steps=steps_per_side)


def holonomy_study(chart, center, sides=(0.1, 0.05, 0.025), steps_per_side=4, plane=(0, 1)) -> dict:
    """Deviation |H - I| for square loops of decreasing side and the fitted log-log slope."""
    devs = []
    for s in sides:
        H = holonomy_loop(chart, square_loop(center, s, plane), steps_per_side=steps_per_side)
        devs.append(float(np.linalg.norm(H - np.eye(chart.n + 2))))
    slope = _loglog_slope(sides, devs)
    return {"sides": list(sides), "deviations": devs, "slope": slope}


def _loglog_slope(xs, ys):
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.maximum(np.asarray(ys, dtype=float), 1e-300))
    return float(np.polyfit(xs, ys, 1)[0])


def flatness_probe(chart, center, side=0.1, steps_per_side=8, tol=1e-6) -> float:
    """|H - I| for one small square loop in every coordinate plane; raises NotFlat above tol."""
    worst = 0.0
    n = chart.n
    for i in range(n):
        for j in range(i + 1, n):
            H = holonomy_loop(chart, square_loop(center, side, (i, j)), steps_per_side=steps_per_side)
            worst = max(worst, float(np.linalg.norm(H - np.eye(n + 2))))
    if worst > tol:
        raise NotFlat("holonomy deviation %.3g around %s exceeds %.3g" % (worst, np.asarray(center).tolist(), tol))
    return worst


class RecoveredScale:
    """sigma(x): top slot of the tractor transported radially from the base point."""

    def __init__(self, chart, base, v0: TractorVec, h=1e-3):
        self.chart = chart
        self.base = np.asarray(base, dtype=float)
        self.v0 = v0.array()
        self.h = h

    def _steps(self, x):
        return max(1, int(np.ceil(np.linalg.norm(np.asarray(x) - self.base) / self.h - 1e-12)))

    def tractors(self, X, steps=None):
        """Transported tractors at the rows of X, all with the same step count
        (by default the one for the farthest point)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if steps is None:
            steps = max(self._steps(x) for x in X)
        starts = np.repeat(self.base[None], len(X), axis=0)
        V0 = np.repeat(self.v0[None], len(X), axis=0)
        return transport_batch(self.chart, starts, X, V0, steps)

    def tractor(self, x):
        return self.tractors([x])[0]

    def __call__(self, x):
        return float(self.tractor(x)[0])

    def hessian_fd(self, x, delta=1e-2):
        """sigma with its gradient and Hessian from fourth-order central differences.

        All stencil points share the step count of the centre, so the
        integration error varies smoothly across the stencil.
        """
        x = np.asarray(x, dtype=float)
        n = len(x)
        E = np.eye(n) * delta
        w1 = ((1, 8), (-1, -8), (2, -1), (-2, 1))
        pts = [x]
        for i in range(n):
            pts += [x + 2 * E[i], x + E[i], x - E[i], x - 2 * E[i]]
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for i, j in pairs:
            for a, _ in w1:
                for b, _ in w1:
                    pts.append(x + a * E[i] + b * E[j])
        vals = self.tractors(np.array(pts), steps=self._steps(x) + 1)[:, 0]
        f0 = vals[0]
        grad = np.zeros(n)
        H = np.zeros((n, n))
        k = 1
        for i in range(n):
            fp2, fp1, fm1, fm2 = vals[k:k + 4]
            k += 4
            grad[i] = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * delta)
            H[i, i] = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * delta ** 2)
        for i, j in pairs:
            s = 0.0
            for _, wa in w1:
                for _, wb in w1:
                    s += wa * wb * vals[k]
                    k += 1
            H[i, j] = H[j, i] = s / (144 * delta ** 2)
        return f0, grad, H


class _FDScalar:
    """Scalar-field adaptor exposing finite-difference jets of a recovered scale."""

    def __init__(self, rec: RecoveredScale, delta):
        self.rec = rec
        self.delta = delta

    def jet(self, x, order=2):
        from .jets import Jet
        f0, g, H = self.rec.hessian_fd(x, self.delta)
        return Jet(np.asarray(f0), g, H)


def einstein_recover(chart, base, v0: TractorVec, samples, h=1e-3, delta=1e-2,
                     probe=True, probe_tol=1e-6) -> dict:
    """Recover sigma from a parallel tractor and report the Einstein residual.

    The residual uses finite differences of the recovered sigma (the
    recovered field has no analytic partials).  ``probe`` first checks that
    the tractor connection is numerically flat at the base point.
    """
    base = chart.check_point(base)
    probe_dev = flatness_probe(chart, base, tol=probe_tol) if probe else None
    rec = RecoveredScale(chart, base, v0, h=h)
    fd = _FDScalar(rec, delta)
    vals, resid = [], []
    for x in samples:
        x = chart.check_point(x)
        vals.append(rec(x))
        resid.append(float(np.max(np.abs(einstein_operator(chart, fd, x)))))
    return {
        "sigma": vals,
        "max_einstein_residual": max(resid) if resid else 0.0,
        "probe_deviation": probe_dev,
        "samples": len(vals),
        "h": h,
        "fd_delta": delta,
        "recovered": rec,
    }

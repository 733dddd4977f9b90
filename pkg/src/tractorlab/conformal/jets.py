"""
Truncated Taylor jets of tensor-valued functions (order <= 3).

A Jet stores a value of shape S together with its first three coordinate
partials, shapes S+(n,), S+(n,n), S+(n,n,n), the derivative indices
trailing.  Products and scalar compositions follow Leibniz and Faa di Bruno,
so rescaled metrics and densities keep analytic partials without any finite
differencing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class Jet:
    val: np.ndarray
    d1: Optional[np.ndarray] = None
    d2: Optional[np.ndarray] = None
    d3: Optional[np.ndarray] = None

    @property
    def order(self):
        for k, a in enumerate((self.d1, self.d2, self.d3)):
            if a is None:
                return k
        return 3

    def truncate(self, order):
        parts = [self.d1, self.d2, self.d3]
        for k in range(order, 3):
            parts[k] = None
        return Jet(self.val, *parts)


def scalar_times(f: Jet, T: Jet, order: int) -> Jet:
    """Jet of f*T for a scalar jet f and a tensor jet T."""
    v = f.val * T.val
    if order == 0:
        return Jet(v)
    fv = float(f.val)
    Tv = np.asarray(T.val)

    def outer(a, b):  # a has tensor shape, b scalar-derivative shape
        return np.multiply.outer(a, b)

    d1 = outer(Tv, f.d1) + fv * T.d1
    if order == 1:
        return Jet(v, d1)
    d2 = outer(Tv, f.d2) + fv * T.d2
    cross = np.einsum("...i,j->...ij", T.d1, f.d1)
    d2 = d2 + cross + np.swapaxes(cross, -1, -2)
    if order == 2:
        return Jet(v, d1, d2)
    d3 = outer(Tv, f.d3) + fv * T.d3
    T1, T2, f1, f2 = T.d1, T.d2, f.d1, f.d2
    d3 = (d3
          + np.einsum("...k,ij->...ijk", T1, f2)
          + np.einsum("...j,ik->...ijk", T1, f2)
          + np.einsum("...i,jk->...ijk", T1, f2)
          + np.einsum("...jk,i->...ijk", T2, f1)
          + np.einsum("...ik,j->...ijk", T2, f1)
          + np.einsum("...ij,k->...ijk", T2, f1))
    return Jet(v, d1, d2, d3)


def compose(phi: Callable[[float, int], float], f: Jet, order: int) -> Jet:
    """Jet of phi(f) for scalar f; phi(t, k) returns the k-th derivative at t."""
    t = float(f.val)
    p0 = phi(t, 0)
    if order == 0:
        return Jet(np.asarray(p0))
    p1 = phi(t, 1)
    d1 = p1 * f.d1
    if order == 1:
        return Jet(np.asarray(p0), d1)
    p2 = phi(t, 2)
    d2 = p2 * np.outer(f.d1, f.d1) + p1 * f.d2
    if order == 2:
        return Jet(np.asarray(p0), d1, d2)
    p3 = phi(t, 3)
    g = f.d1
    d3 = p3 * np.einsum("i,j,k->ijk", g, g, g)
    a = (np.einsum("ij,k->ijk", f.d2, g) + np.einsum("ik,j->ijk", f.d2, g)
         + np.einsum("jk,i->ijk", f.d2, g))
    d3 = d3 + p2 * a + p1 * f.d3
    return Jet(np.asarray(p0), d1, d2, d3)


def power(f: Jet, p: float, order: int) -> Jet:
    def phi(t, k):
        c = 1.0
        for i in range(k):
            c *= p - i
        return c * t ** (p - k)
    return compose(phi, f, order)


def log_jet(f: Jet, order: int) -> Jet:
    def phi(t, k):
        if k == 0:
            return np.log(t)
        return (-1) ** (k - 1) * np.prod(range(1, k)) / t ** k
    return compose(phi, f, order)

"""
Algebraic transformation and normalization formulas for |1|-graded models.

Everything here is exact and chart-free.  Differential inputs such as the
covariant derivative of a section, or of a one-form Upsilon, are values the
caller passes in.

Cochains with values in the adjoint module use the indexing of
:mod:`tractorlab.cohomology`: entry ``s * dim g + m`` of a 1-cochain is the
b_m-coefficient of phi(X_s); a 2-cochain is indexed by the pair (s, t),
s < t, in combinations order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .cohomology import Complex, cochain_space
from .exact import RatMatrix, as_rational, pivot_columns, solve, vec_is_zero
from .lie_core import (GradedLieAlgebra, Representation, adjoint_rep, bracket, duality_scale,
                       natural_pairing)

F0 = Fraction(0)


# ---------------------------------------------------------------------------
# data holders


@dataclass(frozen=True)
class AdjointTractorTriple:
    """An adjoint tractor (pi(s), s_0, s_1) in a fixed splitting; all three
    slots are full coefficient vectors supported in grades -1, 0, +1."""

    xi: tuple
    s0: tuple
    s1: tuple
    algebra: GradedLieAlgebra

    def __post_init__(self):
        for vec, g in ((self.xi, -1), (self.s0, 0), (self.s1, 1)):
            self.algebra._check(vec)
            if any(c for i, c in enumerate(vec) if self.algebra.grade[i] != g):
                raise ValueError("slot of grade %d has support outside g_%d" % (g, g))

    @classmethod
    def make(cls, alg, xi=None, s0=None, s1=None):
        z = (F0,) * alg.dim
        return cls(tuple(xi) if xi is not None else z, tuple(s0) if s0 is not None else z,
                   tuple(s1) if s1 is not None else z, alg)


@dataclass(frozen=True)
class SplitModuleVector:
    """A module vector cut into its grade components, lowest grade first."""

    rep: Representation
    grades: tuple
    components: tuple

    @classmethod
    def from_flat(cls, rep, v):
        if len(v) != rep.module_dim:
            raise ValueError("vector of length %d, module has dimension %d" % (len(v), rep.module_dim))
        gs, comps = [], []
        for g, idx in rep.grade_indices():
            gs.append(g)
            comps.append(tuple(as_rational(v[i]) for i in idx))
        return cls(rep, tuple(gs), tuple(comps))

    def flat(self):
        out = [F0] * self.rep.module_dim
        for (g, idx), comp in zip(self.rep.grade_indices(), self.components):
            for i, c in zip(idx, comp):
                out[i] = c
        return out

    def component(self, g):
        return self.components[self.grades.index(Fraction(g))]


def _flat(v):
    return v.flat() if isinstance(v, SplitModuleVector) else [as_rational(x) for x in v]


def _restrict(alg, v, g):
    return [c if alg.grade[i] == g else F0 for i, c in enumerate(v)]


def _require_grade(alg, v, g, name):
    alg._check(v)
    if any(c for i, c in enumerate(v) if alg.grade[i] != g):
        raise ValueError("%s must lie in g_%d" % (name, g))


# ---------------------------------------------------------------------------
# cochain helpers


def cochain1(alg, values: Sequence[Sequence]) -> list:
    """1-cochain with phi(X_s) = values[s] (algebra coefficient vectors)."""
    if len(values) != len(alg.minus):
        raise ValueError("need one value per g_-1 basis element")
    out = []
    for v in values:
        alg._check(v)
        out.extend(as_rational(x) for x in v)
    return out


def cochain1_value(alg, phi, xi) -> list:
    """phi(xi) for xi a coefficient vector supported in g_{-1}."""
    d = alg.dim
    out = [F0] * d
    for s, idx in enumerate(alg.minus):
        c = xi[idx]
        if c:
            for m in range(d):
                out[m] += c * phi[s * d + m]
    return out


def cochain2_value(alg, R, s, t) -> list:
    """R(X_s, X_t) for positions s, t in the g_{-1} basis."""
    if s == t:
        return [F0] * alg.dim
    sign = 1
    if s > t:
        s, t, sign = t, s, -1
    pairs = list(combinations(range(len(alg.minus)), 2))
    p = pairs.index((s, t))
    d = alg.dim
    return [sign * R[p * d + m] for m in range(d)]


def cochain_homogeneities(alg, k, phi) -> set:
    C = cochain_space(alg, adjoint_rep(alg), k)
    if len(phi) != C.dim:
        raise ValueError("cochain of length %d, C^%d has dimension %d" % (len(phi), k, C.dim))
    return {C.homogeneity[i] for i, c in enumerate(phi) if c}


# ---------------------------------------------------------------------------
# curvature deformation and normalization


def deform_curvature_lowest(alg, phi) -> list:
    """The 2-cochain (X, Y) -> [X, phi(Y)] - [Y, phi(X)] for homogeneous phi."""
    hs = cochain_homogeneities(alg, 1, phi)
    if len(hs) > 1:
        raise ValueError("phi is not homogeneous (homogeneities %s)" % sorted(hs))
    if hs and hs.pop() not in (1, 2):
        raise ValueError("phi must have homogeneity 1 or 2")
    m = len(alg.minus)
    vals = [cochain1_value(alg, phi, alg.unit(i)) for i in alg.minus]
    out = []
    for s, t in combinations(range(m), 2):
        Xs, Xt = alg.unit(alg.minus[s]), alg.unit(alg.minus[t])
        a = bracket(alg, Xs, vals[t])
        b = bracket(alg, Xt, vals[s])
        out.extend(x - y for x, y in zip(a, b))
    return out


def _adjoint_complex(alg):
    cache = getattr(alg, "_adjoint_complex", None)
    if cache is None:
        cache = Complex(alg, adjoint_rep(alg))
        object.__setattr__(alg, "_adjoint_complex", cache)
    return cache


class NormalizationError(ValueError):
    pass


def normalize_rho(alg, R) -> list:
    """The unique Rho in im d* with Box Rho = -d* R (R: 2-cochain of homogeneity 2)."""
    hs = cochain_homogeneities(alg, 2, R)
    if hs - {2}:
        raise ValueError("R must have homogeneity 2, found %s" % sorted(hs))
    cx = _adjoint_complex(alg)
    rhs = [-x for x in cx.dstar(2)(R)]
    if vec_is_zero(rhs):
        return [F0] * cx.space(1).dim
    DS = cx.dstar(2).matrix
    cols = pivot_columns(DS)
    B = RatMatrix.from_columns([DS.column(j) for j in cols], nrows=DS.nrows)
    try:
        c = solve(cx.box(1).matrix @ B, rhs)
    except ValueError:
        raise NormalizationError("-d*R is not in the image of Box on im d*") from None
    return B.apply(c)


def rho_matrix(alg, Rho) -> list:
    """Rho_ab: the coefficient of the b-th g_1 basis element in Rho(X_a)."""
    d = alg.dim
    return [[Rho[s * d + p] for p in alg.plus] for s in range(len(alg.minus))]


def rho_from_matrix(alg, P) -> list:
    """Inverse of :func:`rho_matrix`."""
    vals = []
    for row in P:
        v = [F0] * alg.dim
        for p, c in zip(alg.plus, row):
            v[p] = as_rational(c)
        vals.append(v)
    return cochain1(alg, vals)


def _conformal_only(alg):
    if alg.kind != "conformal":
        raise ValueError("only defined for the conformal algebra, got %r" % alg.kind)


def so_element(alg, M) -> list:
    """Coefficient vector of the middle-block skew matrix M (n x n) in conformal g_0."""
    _conformal_only(alg)
    n = alg.params[0]
    out = [F0] * alg.dim
    for a in range(n):
        for b in range(n):
            if as_rational(M[a][b]) != -as_rational(M[b][a]):
                raise ValueError("matrix is not skew")
    for k, lab in enumerate(alg.labels):
        if lab.startswith("L"):
            a, b = int(lab[1]) - 1, int(lab[2]) - 1
            out[k] = as_rational(M[a][b])
    return out


def curvature_cochain(alg, Riem) -> list:
    """2-cochain R(X_a, X_b) = the so(n) matrix (R_ab^c_d)_{cd}, for an
    orthonormal identification of the tangent space with g_{-1}.

    ``Riem[a][b][c][d]`` is R_ab^c_d with exact rational entries.
    """
    _conformal_only(alg)
    n = alg.params[0]
    out = []
    for a, b in combinations(range(n), 2):
        out.extend(so_element(alg, [[Riem[a][b][c][d] for d in range(n)] for c in range(n)]))
    return out


def round_sphere_riemann(n, K=1):
    """R_ab^c_d = K(delta^c_a delta_bd - delta^c_b delta_ad) in an orthonormal frame."""
    K = as_rational(K)
    d = lambda i, j: 1 if i == j else 0
    return [[[[K * (d(c, a) * d(b, e) - d(c, b) * d(a, e)) for e in range(n)] for c in range(n)]
             for b in range(n)] for a in range(n)]


def ricci_of(Riem):
    """Ric_bd = R_ab^a_d."""
    n = len(Riem)
    return [[sum((Riem[a][b][a][d] for a in range(n)), F0) for d in range(n)] for b in range(n)]


def codifferential_as_trace(alg, R) -> list:
    """d*R for a g_0-valued 2-cochain, returned as the array T_ab = coefficient
    of the b-th g_1 basis element in (d*R)(X_a)."""
    _conformal_only(alg)
    cx = _adjoint_complex(alg)
    return rho_matrix(alg, cx.dstar(2)(R))


def is_co_closed(alg, R) -> bool:
    return vec_is_zero(_adjoint_complex(alg).dstar(2)(R))


def coboundary1(alg, phi) -> list:
    return _adjoint_complex(alg).d(1)(phi)


# ---------------------------------------------------------------------------
# change of Weyl structure


def _nilpotent_exp_apply(A: RatMatrix, v, sign=1):
    """exp(sign * A) v for nilpotent A, summed until the terms vanish."""
    out = list(v)
    term = list(v)
    i = 0
    while True:
        i += 1
        term = [sign * x / i for x in A.apply(term)]
        if vec_is_zero(term):
            return out
        if i > A.nrows + 1:
            raise ValueError("matrix is not nilpotent")
        out = [a + b for a, b in zip(out, term)]


def recalibrate_components(rep, Upsilon, v):
    """lambda(exp(-Upsilon)) v, re-split by grade."""
    alg = rep.algebra
    _require_grade(alg, Upsilon, 1, "Upsilon")
    flat = _flat(v)
    out = _nilpotent_exp_apply(rep.matrix(Upsilon), flat, -1)
    return SplitModuleVector.from_flat(rep, out)


def weyl_connection_shift(rep, Upsilon, xi, v) -> list:
    """Correction term -lambda([Upsilon, xi]) v of the Weyl connection under a
    change of Weyl structure.  Only valid when g_1 acts trivially."""
    alg = rep.algebra
    if not rep.plus_acts_trivially:
        raise ValueError("representation %s is not completely reducible (g_1 acts)" % rep.label)
    _require_grade(alg, Upsilon, 1, "Upsilon")
    _require_grade(alg, xi, -1, "xi")
    c = bracket(alg, Upsilon, xi)
    return [-x for x in rep.act(c, _flat(v))]


def rho_shift(alg, Upsilon, xi, nablaUpsilon_val, Rho) -> list:
    """Rho(xi) + nabla_xi Upsilon + 1/2 [Upsilon, [Upsilon, xi]]."""
    _require_grade(alg, Upsilon, 1, "Upsilon")
    _require_grade(alg, xi, -1, "xi")
    _require_grade(alg, nablaUpsilon_val, 1, "nabla Upsilon")
    base = cochain1_value(alg, Rho, xi)
    quad = bracket(alg, Upsilon, bracket(alg, Upsilon, xi))
    return [a + b + q / 2 for a, b, q in zip(base, nablaUpsilon_val, quad)]


# ---------------------------------------------------------------------------
# derivatives in a Weyl splitting


def bullet_action(rep, a, v) -> list:
    return rep.act(a, _flat(v))


def algebraic_bracket(alg, s1, s2) -> list:
    return bracket(alg, s1, s2)


def fundamental_derivative_components(rep, s: AdjointTractorTriple, v, nabla_v, Rho_of_xi):
    """(D_s v)_i = nabla v_i - s_0 . v_i + (Rho(pi s) - s_1) . v_{i-1}.

    The g_1 action raises the module grade by one, so applying it to the
    whole vector produces exactly the v_{i-1} contributions.
    """
    alg = rep.algebra
    _require_grade(alg, Rho_of_xi, 1, "Rho(xi)")
    flat = _flat(v)
    nv = _flat(nabla_v)
    if len(nv) != len(flat):
        raise ValueError("derivative values do not match the module grading")
    a = rep.act(list(s.s0), flat)
    b = rep.act([r - t for r, t in zip(Rho_of_xi, s.s1)], flat)
    return SplitModuleVector.from_flat(rep, [x - y + z for x, y, z in zip(nv, a, b)])


def tractor_derivative_components(rep, xi, v, nabla_v, Rho_of_xi):
    """(nabla_xi v)_i = nabla_xi v_i + Rho(xi) . v_{i-1} + xi . v_{i+1}."""
    alg = rep.algebra
    if not rep.is_full:
        raise ValueError("representation %s has no g_-1 action" % rep.label)
    _require_grade(alg, xi, -1, "xi")
    _require_grade(alg, Rho_of_xi, 1, "Rho(xi)")
    flat = _flat(v)
    nv = _flat(nabla_v)
    if len(nv) != len(flat):
        raise ValueError("derivative values do not match the module grading")
    a = rep.act(list(Rho_of_xi), flat)
    b = rep.act(list(xi), flat)
    return SplitModuleVector.from_flat(rep, [x + y + z for x, y, z in zip(nv, a, b)])


# ---------------------------------------------------------------------------
# frozen slot identifications


def conformal_standard_slots(n: int) -> dict:
    """Positions of sigma, mu_1..mu_n, rho in the defining basis of so(n+1,1)."""
    return {"sigma": n + 1, "mu": list(range(1, n + 1)), "rho": 0}


def conformal_standard_vector(n, sigma, mu, rho) -> list:
    sl = conformal_standard_slots(n)
    v = [F0] * (n + 2)
    v[sl["sigma"]] = as_rational(sigma)
    for i, c in zip(sl["mu"], mu):
        v[i] = as_rational(c)
    v[sl["rho"]] = as_rational(rho)
    return v


def conformal_standard_unpack(n, v):
    sl = conformal_standard_slots(n)
    return v[sl["sigma"]], [v[i] for i in sl["mu"]], v[sl["rho"]]


def conformal_plus(alg, w) -> list:
    """g_1 element whose covector on g_{-1} is w (Upsilon_a = w_a)."""
    out = [F0] * alg.dim
    for p, c in zip(alg.plus, w):
        out[p] = as_rational(c)
    return out


def conformal_minus(alg, x) -> list:
    out = [F0] * alg.dim
    for p, c in zip(alg.minus, x):
        out[p] = as_rational(c)
    return out


def grassmannian_slots(p: int, q: int) -> dict:
    """The (p, q) split of the standard module: v spans the first p basis
    vectors (higher grade), w the last q (projecting part)."""
    return {"v": list(range(p)), "w": list(range(p, p + q))}


def block_matrix_of(alg, X, rows, cols):
    """Submatrix of the defining matrix of X."""
    M = alg.element(X)
    return [[M[i, j] for j in cols] for i in rows]


def scale_of(alg):
    return duality_scale(alg)


def pairing(alg, Upsilon, xi):
    return natural_pairing(alg, Upsilon, xi)

"""
Exact matrix realizations of |1|-graded Lie algebras and their modules.

Three families are built in:

* conformal     so(n+1,1) preserving Q(x,x) = 2 x_0 x_{n+1} + x_1^2 + ... + x_n^2
* projective    sl(n+1) with (1, n) block grading
* grassmannian  sl(p+q) with (p, q) block grading

Basis order is g_{-1}, then g_0 (grading element last), then g_1; inside a
block, elements follow row-major matrix position, except that the g_1 list
of the block sl algebras is the transposed g_{-1} list (trace-dual order).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .exact import RatMatrix, as_rational, fstr, solve, rank

F0 = Fraction(0)
F1 = Fraction(1)


class UnsupportedAlgebra(ValueError):
    pass


def _unit(N, i, j, c=1):
    M = RatMatrix(N, N)
    M[i, j] = c
    return M


def _flatten(M: RatMatrix) -> list:
    out = [F0] * (M.nrows * M.ncols)
    for (i, j), v in M.entries():
        out[i * M.ncols + j] = v
    return out


@dataclass(frozen=True, eq=False)
class GradedLieAlgebra:
    """A |1|-graded Lie algebra realized by rational matrices.

    ``cijk`` is stored sparsely: ``cijk[(i, j)] = {k: c}`` for i < j, with
    [b_i, b_j] = sum_k c b_k.
    """

    kind: str
    params: tuple
    defining_dim: int
    basis: tuple
    grade: tuple
    grading_element_index: int
    cijk: dict = field(repr=False)
    # raising operators for the semisimple part of g_0, as (real, imag)
    # coefficient vectors; None when not known for this algebra
    raising: Optional[tuple] = field(default=None, repr=False)
    # per-position labels, only used for diagnostics
    labels: tuple = field(default=(), repr=False)

    @property
    def dim(self):
        return len(self.basis)

    def indices(self, g):
        return [i for i, d in enumerate(self.grade) if d == g]

    @property
    def minus(self):
        return self.indices(-1)

    @property
    def zero(self):
        return self.indices(0)

    @property
    def plus(self):
        return self.indices(1)

    def grade_dims(self):
        return tuple(len(self.indices(g)) for g in (-1, 0, 1))

    def unit(self, i):
        v = [F0] * self.dim
        v[i] = F1
        return v

    def element(self, coeffs: Sequence) -> RatMatrix:
        """Matrix of sum_i coeffs[i] b_i."""
        self._check(coeffs)
        N = self.defining_dim
        M = RatMatrix(N, N)
        for c, B in zip(coeffs, self.basis):
            if c:
                M = M + B * c
        return M

    def coordinates(self, M: RatMatrix) -> list:
        """Exact coordinates of a matrix in the basis; raises if M is outside."""
        A = RatMatrix.from_columns([_flatten(B) for B in self.basis])
        return solve(A, _flatten(M))

    def _check(self, v):
        if len(v) != self.dim:
            raise ValueError("coefficient vector of length %d, algebra has dimension %d" % (len(v), self.dim))

    def to_json(self) -> dict:
        trip = []
        for (i, j), row in sorted(self.cijk.items()):
            for k, c in sorted(row.items()):
                trip.append([i, j, k, fstr(c)])
        return {
            "kind": self.kind,
            "params": list(self.params),
            "basis": [[[fstr(v) for v in r] for r in B.to_dense()] for B in self.basis],
            "grade": list(self.grade),
            "cijk": trip,
            "grading_element_index": self.grading_element_index,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _structure_constants(basis):
    A = RatMatrix.from_columns([_flatten(B) for B in basis])
    cijk = {}
    for i, j in combinations(range(len(basis)), 2):
        C = basis[i].commutator(basis[j])
        if C.is_zero():
            continue
        x = solve(A, _flatten(C))
        cijk[(i, j)] = {k: c for k, c in enumerate(x) if c}
    return cijk


def from_basis(kind, params, basis, grade, grading_element_index, raising=None, labels=()):
    """Build a graded algebra from basis matrices and grade labels.

    The basis must be linearly independent and closed under commutators;
    the grading element must act by the stated grades.  Violations raise
    ValueError.
    """
    basis = tuple(basis)
    grade = tuple(grade)
    if len(basis) != len(grade):
        raise ValueError("basis and grade lists differ in length")
    if any(g not in (-1, 0, 1) for g in grade):
        raise ValueError("grades must lie in {-1, 0, 1}")
    N = basis[0].nrows
    A = RatMatrix.from_columns([_flatten(B) for B in basis])
    if rank(A) != len(basis):
        raise ValueError("basis matrices are linearly dependent")
    try:
        cijk = _structure_constants(basis)
    except ValueError:
        raise ValueError("basis is not closed under the commutator") from None
    alg = GradedLieAlgebra(kind, tuple(params), N, basis, grade, grading_element_index, cijk,
                           raising=raising, labels=tuple(labels))
    if grade[grading_element_index] != 0:
        raise ValueError("grading element must have grade 0")
    for (i, j), row in cijk.items():
        for k in row:
            if grade[k] != grade[i] + grade[j]:
                raise ValueError("bracket of %d and %d leaves grade %d" % (i, j, grade[i] + grade[j]))
    Eidx = grading_element_index
    for i in range(len(basis)):
        if i == Eidx:
            continue
        want = {i: Fraction(grade[i])} if grade[i] else {}
        if _bracket_units(alg, Eidx, i) != want:
            raise ValueError("grading element does not act by grade on basis element %d" % i)
    return alg


def _bracket_units(alg, i, j):
    if i == j:
        return {}
    if i < j:
        return dict(alg.cijk.get((i, j), {}))
    return {k: -c for k, c in alg.cijk.get((j, i), {}).items()}


# ---------------------------------------------------------------------------
# builders


def build_conformal_algebra(n: int) -> GradedLieAlgebra:
    if not isinstance(n, int) or n < 3:
        raise UnsupportedAlgebra("conformal algebra needs n >= 3, got %r" % (n,))
    N = n + 2
    last = n + 1
    basis, grade, labels = [], [], []
    # g_{-1}: column 0 carries v, row n+1 carries -v^T
    for a in range(1, n + 1):
        basis.append(_unit(N, a, 0) + _unit(N, last, a, -1))
        grade.append(-1)
        labels.append("X%d" % a)
    # so(n) in the middle block
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            basis.append(_unit(N, a, b) + _unit(N, b, a, -1))
            grade.append(0)
            labels.append("L%d%d" % (a, b))
    basis.append(_unit(N, 0, 0) + _unit(N, last, last, -1))
    grade.append(0)
    labels.append("E")
    Eidx = len(basis) - 1
    # g_1: row 0 carries w, column n+1 carries -w^T
    for a in range(1, n + 1):
        basis.append(_unit(N, 0, a) + _unit(N, a, last, -1))
        grade.append(1)
        labels.append("Z%d" % a)
    alg = from_basis("conformal", (n,), basis, grade, Eidx, labels=labels)
    return _with_raising(alg, _so_raising(alg, n))


def build_projective_algebra(n: int) -> GradedLieAlgebra:
    if not isinstance(n, int) or n < 2:
        raise UnsupportedAlgebra("projective algebra needs n >= 2, got %r" % (n,))
    return _block_sl("projective", (n,), 1, n)


def build_grassmannian_algebra(p: int, q: int) -> GradedLieAlgebra:
    if not (isinstance(p, int) and isinstance(q, int)) or p < 2 or q < p:
        raise UnsupportedAlgebra("grassmannian algebra needs 2 <= p <= q, got (%r, %r)" % (p, q))
    return _block_sl("grassmannian", (p, q), p, q)


def _block_sl(kind, params, p, q):
    """sl(p+q) graded by the (p, q) block structure; g_{-1} is the lower-left block."""
    N = p + q
    top = range(p)
    bot = range(p, N)
    basis, grade, labels = [], [], []
    for i in bot:
        for j in top:
            basis.append(_unit(N, i, j))
            grade.append(-1)
            labels.append("e%d%d" % (i, j))
    g0 = []
    for blk in (top, bot):
        for i in blk:
            for j in blk:
                if i != j:
                    g0.append((i, j))
    g0.sort()
    for i, j in g0:
        basis.append(_unit(N, i, j))
        grade.append(0)
        labels.append("e%d%d" % (i, j))
    for blk in (top, bot):
        for i in list(blk)[:-1]:
            basis.append(_unit(N, i, i) + _unit(N, i + 1, i + 1, -1))
            grade.append(0)
            labels.append("h%d" % i)
    E = RatMatrix(N, N)
    for i in top:
        E[i, i] = Fraction(q, N)
    for i in bot:
        E[i, i] = Fraction(-p, N)
    basis.append(E)
    grade.append(0)
    labels.append("E")
    Eidx = len(basis) - 1
    # g_1 is listed as the transposes of the g_{-1} list, so the trace
    # pairing between the two bases is the identity
    for i in bot:
        for j in top:
            basis.append(_unit(N, j, i))
            grade.append(1)
            labels.append("e%d%d" % (j, i))
    alg = from_basis(kind, params, basis, grade, Eidx, labels=labels)
    raising = []
    pos = {lab: k for k, lab in enumerate(labels)}
    for blk in (top, bot):
        for i in blk:
            for j in blk:
                if i < j:
                    raising.append((alg.unit(pos["e%d%d" % (i, j)]), None))
    return _with_raising(alg, raising)


def _with_raising(alg, raising):
    object.__setattr__(alg, "raising", tuple(raising))
    return alg


def _so_raising(alg, n):
    """Complex positive root vectors of so(n) (Euclidean form) as (re, im) pairs.

    With z_j = e_{2j} + i e_{2j+1}, the positive roots are spanned by
    z_a ^ z_b, z_a ^ conj(z_b) (a < b) and, for odd n, z_a ^ e_{n-1}.
    """
    pos = {lab: k for k, lab in enumerate(alg.labels)}
    m = n // 2

    def vec(k):
        v = [F0] * n
        v[k] = F1
        return v

    zero = [F0] * n

    def skew(u, v):
        # coefficients of u v^T - v u^T on L_ab (a < b), 1-based labels
        out = [F0] * alg.dim
        for a in range(n):
            for b in range(a + 1, n):
                c = u[a] * v[b] - u[b] * v[a]
                if c:
                    out[pos["L%d%d" % (a + 1, b + 1)]] += c
        return out

    def cskew(u, v):
        (ur, ui), (vr, vi) = u, v
        re = [x - y for x, y in zip(skew(ur, vr), skew(ui, vi))]
        im = [x + y for x, y in zip(skew(ur, vi), skew(ui, vr))]
        return re, im

    z = [(vec(2 * j), vec(2 * j + 1)) for j in range(m)]
    zbar = [(vec(2 * j), [-x for x in vec(2 * j + 1)]) for j in range(m)]
    ops = []
    for a in range(m):
        for b in range(a + 1, m):
            ops.append(cskew(z[a], z[b]))
            ops.append(cskew(z[a], zbar[b]))
        if n % 2:
            ops.append(cskew(z[a], (vec(n - 1), zero)))
    return ops


def build_algebra(kind: str, params) -> GradedLieAlgebra:
    params = tuple(params)
    if kind == "conformal":
        return build_conformal_algebra(*params)
    if kind == "projective":
        return build_projective_algebra(*params)
    if kind == "grassmannian":
        return build_grassmannian_algebra(*params)
    raise UnsupportedAlgebra("unknown algebra kind %r" % (kind,))


def parse_algebra_spec(spec: str):
    """'conformal:4' -> ('conformal', (4,)); 'grassmannian:2,3' -> (..., (2, 3))."""
    try:
        kind, _, rest = spec.partition(":")
        params = tuple(int(t) for t in rest.replace("x", ",").split(",") if t)
    except ValueError:
        raise ValueError("bad algebra spec %r" % (spec,)) from None
    if not params:
        raise ValueError("bad algebra spec %r" % (spec,))
    return kind, params


# ---------------------------------------------------------------------------
# algebra operations


def bracket(alg: GradedLieAlgebra, X: Sequence, Y: Sequence) -> list:
    alg._check(X)
    alg._check(Y)
    out = [F0] * alg.dim
    xs = [(i, as_rational(c)) for i, c in enumerate(X) if c]
    ys = [(j, as_rational(c)) for j, c in enumerate(Y) if c]
    for i, a in xs:
        for j, b in ys:
            if i == j:
                continue
            if i < j:
                row, s = alg.cijk.get((i, j)), 1
            else:
                row, s = alg.cijk.get((j, i)), -1
            if not row:
                continue
            ab = a * b * s
            for k, c in row.items():
                out[k] += ab * c
    return out


def trace_form(alg: GradedLieAlgebra, X: Sequence, Y: Sequence) -> Fraction:
    """tr(XY) in the defining matrix realization."""
    return (alg.element(X) @ alg.element(Y)).trace()


def trace_form_matrix(alg) -> RatMatrix:
    n = alg.dim
    M = RatMatrix(n, n)
    for i in range(n):
        for j in range(i, n):
            v = (alg.basis[i] @ alg.basis[j]).trace()
            if v:
                M[i, j] = v
                M[j, i] = v
    return M


def dual_plus_basis(alg) -> list:
    """For each g_{-1} basis element X_i, the g_1 element Z^i with tr(Z^i X_j) = delta_ij."""
    minus, plus = alg.minus, alg.plus
    B = trace_form_matrix(alg)
    pair = B.submatrix(minus, plus)  # pair[i][k] = tr(X_i Y_k)
    out = []
    for i in range(len(minus)):
        rhs = [F1 if j == i else F0 for j in range(len(minus))]
        c = solve(pair, rhs)
        v = [F0] * alg.dim
        for k, idx in enumerate(plus):
            v[idx] = c[k]
        out.append(v)
    return out


def duality_scale(alg) -> Fraction:
    """Trace-form value pairing the k-th g_{-1} with the k-th g_1 basis element.

    Raises when the pairing is not a uniform multiple of the identity in
    the stored bases.
    """
    minus, plus = alg.minus, alg.plus
    vals = set()
    for a, i in enumerate(minus):
        for b, j in enumerate(plus):
            t = (alg.basis[i] @ alg.basis[j]).trace()
            if a == b:
                vals.add(t)
            elif t:
                raise ValueError("pairing of g_-1 and g_1 bases is not diagonal")
    if len(vals) != 1:
        raise ValueError("pairing of g_-1 and g_1 bases is not uniform")
    return vals.pop()


def natural_pairing(alg, upsilon: Sequence, xi: Sequence) -> Fraction:
    """Upsilon(xi) for Upsilon in g_1 read as a covector on g_{-1}."""
    return trace_form(alg, upsilon, xi) / duality_scale(alg)


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True, eq=False)
class Representation:
    """Exact action matrices of (part of) a graded algebra on a module.

    ``action[i]`` is None for algebra elements outside the acting
    subalgebra (e.g. g_{-1} on a module of the parabolic only).
    """

    algebra: GradedLieAlgebra
    module_dim: int
    action: tuple
    module_grade: tuple
    label: str
    # scalar by which the grading element acts on densities; bookkeeping only
    weight: Optional[Fraction] = None

    def act(self, X: Sequence, v: Sequence) -> list:
        return self.matrix(X).apply(list(v))

    def matrix(self, X: Sequence) -> RatMatrix:
        self.algebra._check(X)
        M = RatMatrix(self.module_dim, self.module_dim)
        for c, A in zip(X, self.action):
            if not c:
                continue
            if A is None:
                raise ValueError("representation %s has no action for this element" % self.label)
            M = M + A * c
        return M

    @property
    def is_full(self):
        return all(A is not None for A in self.action)

    @property
    def plus_acts_trivially(self):
        return all(self.action[i] is not None and self.action[i].is_zero() for i in self.algebra.plus)

    def grade_indices(self):
        """Module basis indices grouped by grade, lowest grade first."""
        out = {}
        for m, g in enumerate(self.module_grade):
            out.setdefault(g, []).append(m)
        return [(g, out[g]) for g in sorted(out)]

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "module_dim": self.module_dim,
            "module_grade": [fstr(g) for g in self.module_grade],
            "action": [None if A is None else [[fstr(v) for v in r] for r in A.to_dense()]
                       for A in self.action],
        }


def _grades_from_E(alg, mats):
    E = mats[alg.grading_element_index]
    grades = []
    for m in range(E.nrows):
        row = E.row(m)
        if any(j != m for j in row):
            raise ValueError("grading element does not act diagonally on the module basis")
        grades.append(row.get(m, F0))
    return tuple(grades)


def adjoint_rep(alg: GradedLieAlgebra) -> Representation:
    n = alg.dim
    mats = []
    for i in range(n):
        M = RatMatrix(n, n)
        for j in range(n):
            for k, c in _bracket_units(alg, i, j).items():
                M[k, j] = c
        mats.append(M)
    return Representation(alg, n, tuple(mats), tuple(Fraction(g) for g in alg.grade), "adjoint")


def standard_rep(alg: GradedLieAlgebra) -> Representation:
    mats = tuple(B.copy() for B in alg.basis)
    return Representation(alg, alg.defining_dim, mats, _grades_from_E(alg, mats), "standard")


def _restricted_adjoint(alg, block, label):
    idx = alg.indices(block)
    pos = {i: k for k, i in enumerate(idx)}
    d = len(idx)
    mats = []
    for i in range(alg.dim):
        g = alg.grade[i]
        if g == 0:
            M = RatMatrix(d, d)
            for j in idx:
                for k, c in _bracket_units(alg, i, j).items():
                    M[pos[k], pos[j]] = c
            mats.append(M)
        elif g == 1:
            mats.append(RatMatrix(d, d))
        else:
            mats.append(None)
    return Representation(alg, d, tuple(mats), (Fraction(block),) * d, label)


def tangent_rep(alg) -> Representation:
    """g/p ~ g_{-1} as a completely reducible p-module (g_1 acts by zero)."""
    return _restricted_adjoint(alg, -1, "tangent")


def cotangent_rep(alg) -> Representation:
    """g_1 ~ (g/p)* as a completely reducible p-module."""
    return _restricted_adjoint(alg, 1, "cotangent")


def density_rep(alg, w) -> Representation:
    """One-dimensional p-module of weight w: a E acts by -w a."""
    w = as_rational(w)
    mats = []
    for i in range(alg.dim):
        g = alg.grade[i]
        if g == -1:
            mats.append(None)
        elif i == alg.grading_element_index:
            mats.append(RatMatrix.from_dense([[-w]]))
        else:
            mats.append(RatMatrix(1, 1))
    return Representation(alg, 1, tuple(mats), (-w,), "density(%s)" % fstr(w), weight=w)


def build_rep(alg, label: str) -> Representation:
    if label == "adjoint":
        return adjoint_rep(alg)
    if label == "standard":
        return standard_rep(alg)
    if label == "tangent":
        return tangent_rep(alg)
    if label == "cotangent":
        return cotangent_rep(alg)
    if label.startswith("density"):
        w = label[len("density"):].strip("():")
        return density_rep(alg, Fraction(w))
    raise ValueError("unknown representation %r" % (label,))


def check_homomorphism(rep: Representation) -> bool:
    """rho([X, Y]) == [rho(X), rho(Y)] on all pairs of acting basis elements."""
    alg = rep.algebra
    for i, j in combinations(range(alg.dim), 2):
        Ai, Aj = rep.action[i], rep.action[j]
        if Ai is None or Aj is None:
            continue
        row = _bracket_units(alg, i, j)
        lhs = RatMatrix(rep.module_dim, rep.module_dim)
        for k, c in row.items():
            if rep.action[k] is None:
                return False
            lhs = lhs + rep.action[k] * c
        if lhs != Ai.commutator(Aj):
            return False
    return True


def jacobi_residual_is_zero(alg: GradedLieAlgebra) -> bool:
    n = alg.dim
    for i, j, k in combinations(range(n), 3):
        ei, ej, ek = alg.unit(i), alg.unit(j), alg.unit(k)
        s = bracket(alg, ei, bracket(alg, ej, ek))
        t = bracket(alg, ej, bracket(alg, ek, ei))
        u = bracket(alg, ek, bracket(alg, ei, ej))
        if any(a + b + c for a, b, c in zip(s, t, u)):
            return False
    return True


def algebra_from_json(doc: dict) -> GradedLieAlgebra:
    """Rebuild an algebra from its JSON form (structure constants re-derived and compared)."""
    basis = [RatMatrix.from_dense([[Fraction(v) for v in r] for r in B]) for B in doc["basis"]]
    alg = from_basis(doc["kind"], tuple(doc["params"]), basis, doc["grade"], doc["grading_element_index"])
    stored = {}
    for i, j, k, c in doc["cijk"]:
        stored.setdefault((i, j), {})[k] = Fraction(c)
    if stored != alg.cijk:
        raise ValueError("structure constants in document disagree with the basis")
    if doc["kind"] in ("conformal", "projective", "grassmannian"):
        ref = build_algebra(doc["kind"], doc["params"])
        object.__setattr__(alg, "raising", ref.raising)
        object.__setattr__(alg, "labels", ref.labels)
    return alg

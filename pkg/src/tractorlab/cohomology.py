"""
Cochain complexes C^k(g_{-1}, V) = Lambda^k g_{-1}^* (x) V with exact matrices.

A basis cochain is indexed by (S, m): S a strictly increasing k-subset of
positions in the g_{-1} basis (itertools.combinations order) and m a
module basis index; the flat index is ``subset_index * module_dim + m``.
Through the trace-form duality the same index labels the chain
Z^S (x) v_m of Lambda^k g_1 (x) V, where Z^i is the g_1 element dual to X_i.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Optional, Sequence

from .exact import RatMatrix, fstr, nullity, nullspace, rank
from .lie_core import (GradedLieAlgebra, Representation, _bracket_units, dual_plus_basis,
                       build_algebra, build_rep)

F0 = Fraction(0)


class DegreeError(ValueError):
    pass


class HodgeInconsistency(RuntimeError):
    """The three Hodge summands do not add up: a construction bug, not bad input."""


@dataclass(frozen=True, eq=False)
class CochainSpace:
    algebra: GradedLieAlgebra
    rep: Representation
    degree: int
    subsets: tuple = field(repr=False)
    homogeneity: tuple = field(repr=False)

    @property
    def dim(self):
        return len(self.subsets) * self.rep.module_dim

    @property
    def module_dim(self):
        return self.rep.module_dim

    def index(self, S, m):
        return self._pos[tuple(S)] * self.rep.module_dim + m

    def label(self, idx):
        s, m = divmod(idx, self.rep.module_dim)
        return self.subsets[s], m

    @property
    def _pos(self):
        return _subset_positions(self.subsets)

    def homogeneity_blocks(self):
        """{homogeneity: [indices]} in increasing order of homogeneity."""
        out = {}
        for i, h in enumerate(self.homogeneity):
            out.setdefault(h, []).append(i)
        return dict(sorted(out.items()))


@lru_cache(maxsize=None)
def _subset_positions(subsets):
    return {S: i for i, S in enumerate(subsets)}


def cochain_space(alg: GradedLieAlgebra, rep: Representation, k: int) -> CochainSpace:
    m = len(alg.minus)
    if not 0 <= k <= m:
        raise DegreeError("degree %d outside 0..%d" % (k, m))
    subsets = tuple(combinations(range(m), k))
    hom = tuple(k + g for _ in subsets for g in rep.module_grade)
    return CochainSpace(alg, rep, k, subsets, hom)


def _empty_space(alg, rep, k):
    return CochainSpace(alg, rep, k, (), ())


@dataclass(frozen=True, eq=False)
class LinearMap:
    domain: CochainSpace
    codomain: CochainSpace
    matrix: RatMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError("matrix shape %s does not match spaces (%d <- %d)"
                             % (self.matrix.shape, self.codomain.dim, self.domain.dim))

    def __call__(self, v):
        return self.matrix.apply(v)

    def rank(self):
        return rank(self.matrix)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(other.domain, self.codomain, self.matrix @ other.matrix)


def _require_full(rep, which):
    alg = rep.algebra
    for i in (alg.minus if which < 0 else alg.plus):
        if rep.action[i] is None:
            raise ValueError("representation %s has no action of g_%d" % (rep.label, which))


def _wedge_insert(S, t):
    """Insert t into the sorted tuple S; return (new tuple, position) or None if present."""
    if t in S:
        return None
    pos = sum(1 for s in S if s < t)
    return S[:pos] + (t,) + S[pos:], pos


def coboundary(alg, rep, k) -> LinearMap:
    """d_k : C^k -> C^{k+1}, (d phi)(X_0..X_k) = sum_i (-1)^i X_i . phi(..omit i..)."""
    _require_full(rep, -1)
    dom = cochain_space(alg, rep, k)
    m = len(alg.minus)
    cod = cochain_space(alg, rep, k + 1) if k + 1 <= m else _empty_space(alg, rep, k + 1)
    D = RatMatrix(cod.dim, dom.dim)
    md = rep.module_dim
    acts = [rep.action[i] for i in alg.minus]
    cols = [A.T._rows for A in acts]  # cols[t][mm] = {m': coefficient of v_m' in X_t v_mm}
    for S in dom.subsets:
        for t in range(m):
            ins = _wedge_insert(S, t)
            if ins is None:
                continue
            T, pos = ins
            sign = -1 if pos % 2 else 1
            base_dom = dom.index(S, 0)
            base_cod = cod.index(T, 0)
            for mm in range(md):
                for mp, c in cols[t][mm].items():
                    D._rows[base_cod + mp][base_dom + mm] = D._rows[base_cod + mp].get(base_dom + mm, 0) + sign * c
    _prune(D)
    return LinearMap(dom, cod, D)


def _prune(M):
    for r in M._rows:
        for j in [j for j, v in r.items() if not v]:
            del r[j]


def _chain_boundary(alg, rep, k, plus_actions) -> LinearMap:
    """Matrix of Z_{s_0}^..^Z_{s_{k-1}} (x) v -> sum_i (-1)^i Z_{..omit i..} (x) Z_{s_i} v.

    ``plus_actions[t]`` is the module action of the t-th g_1 element in the
    chosen chain basis.  Chains are indexed exactly like cochains.
    """
    m = len(alg.minus)
    if not 0 <= k <= m:
        raise DegreeError("degree %d outside 0..%d" % (k, m))
    dom = cochain_space(alg, rep, k)
    cod = cochain_space(alg, rep, k - 1) if k >= 1 else _empty_space(alg, rep, -1)
    D = RatMatrix(cod.dim, dom.dim)
    md = rep.module_dim
    cols = [A.T._rows for A in plus_actions]
    for S in dom.subsets:
        for i, t in enumerate(S):
            R = S[:i] + S[i + 1:]
            sign = -1 if i % 2 else 1
            base_dom = dom.index(S, 0)
            base_cod = cod.index(R, 0)
            for mm in range(md):
                for mp, c in cols[t][mm].items():
                    row = D._rows[base_cod + mp]
                    row[base_dom + mm] = row.get(base_dom + mm, 0) + sign * c
    _prune(D)
    return LinearMap(dom, cod, D)


def boundary(alg, rep, k) -> LinearMap:
    """delta_k : C_k(g_1, V) -> C_{k-1}, using the plain g_1 basis."""
    _require_full(rep, 1)
    if not 0 <= k <= len(alg.plus):
        raise DegreeError("degree %d outside 0..%d" % (k, len(alg.plus)))
    return _chain_boundary(alg, rep, k, [rep.action[i] for i in alg.plus])


def _dual_actions(alg, rep):
    return [rep.matrix(Z) for Z in dual_plus_basis(alg)]


def codifferential(alg, rep, k) -> LinearMap:
    """Kostant's d*_k : C^k -> C^{k-1}: the g_1-homology boundary read through
    the trace duality X^{i*} <-> Z^i."""
    _require_full(rep, 1)
    if not 1 <= k <= len(alg.minus):
        raise DegreeError("codifferential needs 1 <= k <= %d, got %d" % (len(alg.minus), k))
    return _chain_boundary(alg, rep, k, _dual_actions(alg, rep))


def _zero_map(dom, cod):
    return LinearMap(dom, cod, RatMatrix(cod.dim, dom.dim))


def laplacian(alg, rep, k) -> LinearMap:
    """Box_k = d_{k-1} d*_k + d*_{k+1} d_k, with missing terms omitted at the ends."""
    m = len(alg.minus)
    if not 0 <= k <= m:
        raise DegreeError("degree %d outside 0..%d" % (k, m))
    C = cochain_space(alg, rep, k)
    box = RatMatrix(C.dim, C.dim)
    if k >= 1:
        box = box + (coboundary(alg, rep, k - 1).matrix @ codifferential(alg, rep, k).matrix)
    if k + 1 <= m:
        box = box + (codifferential(alg, rep, k + 1).matrix @ coboundary(alg, rep, k).matrix)
    return LinearMap(C, C, box)


class Complex:
    """Lazily built and cached matrices of one (algebra, representation) pair."""

    def __init__(self, alg: GradedLieAlgebra, rep: Representation):
        self.alg = alg
        self.rep = rep
        self._cache = {}
        self.top = len(alg.minus)

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def space(self, k):
        return self._get(("C", k), lambda: cochain_space(self.alg, self.rep, k))

    def d(self, k):
        return self._get(("d", k), lambda: coboundary(self.alg, self.rep, k))

    def dstar(self, k):
        return self._get(("ds", k), lambda: codifferential(self.alg, self.rep, k))

    def delta(self, k):
        return self._get(("delta", k), lambda: boundary(self.alg, self.rep, k))

    def box(self, k):
        return self._get(("box", k), lambda: laplacian(self.alg, self.rep, k))

    def rank_d(self, k):
        if k < 0 or k > self.top:
            return 0
        return self._get(("rank_d", k), lambda: rank(self.d(k).matrix))

    def rank_dstar(self, k):
        if k < 1 or k > self.top:
            return 0
        return self._get(("rank_ds", k), lambda: rank(self.dstar(k).matrix))

    def g0_action(self, k, Z):
        return g0_action_on_cochains(self.alg, self.rep, k, Z)


@lru_cache(maxsize=64)
def _complex_for(kind, params, label):
    alg = build_algebra(kind, params)
    return Complex(alg, build_rep(alg, label))


def complex_for(kind: str, params, label: str) -> Complex:
    """Shared cached complex for a built-in algebra; lru_cache serializes insertion."""
    return _complex_for(kind, tuple(params), label)


# ---------------------------------------------------------------------------
# g_0 action and homogeneity


def g0_action_on_cochains(alg, rep, k, Z: Sequence) -> RatMatrix:
    """Matrix of Z in g_0 acting on C^k by the dual action on Lambda^k g_{-1}^*
    tensored with the module action."""
    alg._check(Z)
    if any(Z[i] for i in range(alg.dim) if alg.grade[i] != 0):
        raise ValueError("element is not in g_0")
    C = cochain_space(alg, rep, k)
    minus = alg.minus
    mpos = {idx: s for s, idx in enumerate(minus)}
    # a[s][t]: coefficient of X_s in [Z, X_t]
    a = [[F0] * len(minus) for _ in minus]
    for zi, zc in enumerate(Z):
        if not zc:
            continue
        for t, xt in enumerate(minus):
            for kk, c in _bracket_units(alg, zi, xt).items():
                a[mpos[kk]][t] += zc * c
    rhoZ = rep.matrix(Z)
    md = rep.module_dim
    G = RatMatrix(C.dim, C.dim)
    for S in C.subsets:
        col0 = C.index(S, 0)
        # form part: Z . X^{s*} = -sum_t a[s][t] X^{t*}
        for j, s in enumerate(S):
            rest = S[:j] + S[j + 1:]
            for t in range(len(minus)):
                c = a[s][t]
                if not c:
                    continue
                ins = _wedge_insert(rest, t)
                if ins is None:
                    continue
                T, pos = ins
                # moving t from slot j to slot pos: sign (-1)^(j - pos)
                sign = -1 if (j - pos) % 2 else 1
                row0 = C.index(T, 0)
                for mm in range(md):
                    r = G._rows[row0 + mm]
                    r[col0 + mm] = r.get(col0 + mm, 0) - sign * c
        # module part
        for mp in range(md):
            for mm, c in rhoZ._rows[mp].items():
                r = G._rows[col0 + mp]
                r[col0 + mm] = r.get(col0 + mm, 0) + c
    _prune(G)
    return G


def is_block_diagonal(M: RatMatrix, labels: Sequence) -> bool:
    for i, r in enumerate(M._rows):
        for j in r:
            if labels[i] != labels[j]:
                return False
    return True


# ---------------------------------------------------------------------------
# Hodge theory


@dataclass(frozen=True)
class HodgeReport:
    degree: int
    dim_C: int
    dim_im_dstar: int
    dim_ker_box: int
    dim_im_d: int
    dim_H: int
    homogeneity_histogram: dict
    harmonic_basis: tuple = ()
    algebra: str = ""
    rep: str = ""

    @property
    def consistent(self):
        return self.dim_ker_box == self.dim_H

    def to_json(self, include_basis=True) -> dict:
        out = {
            "degree": self.degree,
            "dim_C": self.dim_C,
            "dim_im_dstar": self.dim_im_dstar,
            "dim_ker_box": self.dim_ker_box,
            "dim_im_d": self.dim_im_d,
            "dim_H": self.dim_H,
            "homogeneity_histogram": {fstr(h): d for h, d in sorted(self.homogeneity_histogram.items())},
        }
        if self.algebra:
            out["algebra"] = self.algebra
            out["rep"] = self.rep
        if include_basis:
            out["harmonic_basis"] = [[fstr(h), [fstr(x) for x in v]] for h, v in self.harmonic_basis]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _as_complex(alg_or_cx, rep=None) -> Complex:
    if isinstance(alg_or_cx, Complex):
        return alg_or_cx
    return Complex(alg_or_cx, rep)


def harmonic_basis(alg, rep=None, k=0) -> list:
    """Exact basis of ker Box_k as (homogeneity, vector) pairs.

    The kernel is computed separately on each homogeneity block, which is
    legitimate because Box preserves homogeneity (checked here).
    """
    cx = _as_complex(alg, rep)
    C = cx.space(k)
    box = cx.box(k).matrix
    if not is_block_diagonal(box, C.homogeneity):
        raise HodgeInconsistency("Laplacian mixes homogeneities in degree %d" % k)
    out = []
    for h, idx in C.homogeneity_blocks().items():
        sub = box.submatrix(idx, idx)
        for w in nullspace(sub):
            v = [F0] * C.dim
            for c, i in zip(w, idx):
                v[i] = c
            out.append((h, v))
    return out


def hodge_decomposition(alg, rep=None, k=0, with_basis=True) -> HodgeReport:
    cx = _as_complex(alg, rep)
    C = cx.space(k)
    im_ds = cx.rank_dstar(k + 1)
    im_d = cx.rank_d(k - 1)
    ker_d = C.dim - cx.rank_d(k)
    if with_basis:
        basis = harmonic_basis(cx, None, k)
        kb = len(basis)
        hist = Counter(h for h, _ in basis)
    else:
        box = cx.box(k).matrix
        kb = 0
        hist = Counter()
        for h, idx in C.homogeneity_blocks().items():
            d = nullity(box.submatrix(idx, idx))
            if d:
                hist[h] = d
                kb += d
        basis = []
    if im_ds + kb + im_d != C.dim:
        raise HodgeInconsistency(
            "degree %d: %d + %d + %d != dim C = %d" % (k, im_ds, kb, im_d, C.dim))
    a = cx.alg
    return HodgeReport(k, C.dim, im_ds, kb, im_d, ker_d - im_d, dict(hist), tuple(basis),
                       algebra="%s:%s" % (a.kind, ",".join(map(str, a.params))), rep=cx.rep.label)


def complex_axioms(alg, rep=None, k=0) -> dict:
    """Exact structural checks starting in degree k.

    Composites that would leave the range of degrees are vacuously zero and
    reported as true.  ``box_injective_on_im_dstar`` compares the rank of
    Box_k d*_{k+1} with the rank of d*_{k+1}; ``ker_box_is_ker_box2``
    compares the ranks of Box_k and Box_k squared.
    """
    cx = _as_complex(alg, rep)
    m = cx.top
    out = {"degree": k}
    out["d_squared_zero"] = (cx.d(k + 1).matrix @ cx.d(k).matrix).is_zero() if k + 2 <= m else True
    out["delta_squared_zero"] = ((cx.delta(k - 1).matrix @ cx.delta(k).matrix).is_zero()
                                 if 2 <= k <= len(cx.alg.plus) else True)
    out["dstar_squared_zero"] = ((cx.dstar(k - 1).matrix @ cx.dstar(k).matrix).is_zero()
                                 if 2 <= k <= m else True)
    try:
        rep_ = hodge_decomposition(cx, None, k, with_basis=False)
        out["hodge_sum"] = True
        out["ker_box_is_H"] = rep_.consistent
        out["dims"] = {"dim_C": rep_.dim_C, "dim_im_dstar": rep_.dim_im_dstar,
                       "dim_ker_box": rep_.dim_ker_box, "dim_im_d": rep_.dim_im_d, "dim_H": rep_.dim_H}
    except HodgeInconsistency as exc:
        out["hodge_sum"] = False
        out["ker_box_is_H"] = False
        out["error"] = str(exc)
    box = cx.box(k).matrix
    if k + 1 <= m:
        DS = cx.dstar(k + 1).matrix
        out["box_injective_on_im_dstar"] = rank(box @ DS) == cx.rank_dstar(k + 1)
    else:
        out["box_injective_on_im_dstar"] = True
    out["ker_box_is_ker_box2"] = rank(box @ box) == rank(box)
    out["ok"] = all(v for key, v in out.items() if isinstance(v, bool))
    return out


def count_irreducibles(alg, rep=None, k=0, basis: Optional[list] = None) -> int:
    """Number of irreducible g_0-summands of the harmonic space in degree k.

    Counts highest-weight vectors: the complex dimension of the joint kernel
    of the raising operators of the semisimple part of g_0 on ker Box.
    """
    cx = _as_complex(alg, rep)
    a = cx.alg
    if a.raising is None:
        raise NotImplementedError("no raising operators known for algebra kind %r" % a.kind)
    if basis is None:
        basis = harmonic_basis(cx, None, k)
    vecs = [v for _, v in basis] if basis and isinstance(basis[0], tuple) else list(basis)
    d = len(vecs)
    if d == 0:
        return 0
    B = RatMatrix.from_columns(vecs)
    blocks = []
    for re, im in a.raising:
        GR = g0_action_on_cochains(a, cx.rep, k, re) @ B
        if im is None:
            blocks.append(RatMatrix.hstack(GR, RatMatrix(GR.nrows, d)))
            blocks.append(RatMatrix.hstack(RatMatrix(GR.nrows, d), GR))
        else:
            GI = g0_action_on_cochains(a, cx.rep, k, im) @ B
            blocks.append(RatMatrix.hstack(GR, -GI))
            blocks.append(RatMatrix.hstack(GI, GR))
    if not blocks:
        return d
    K = nullity(RatMatrix.vstack(*blocks))
    assert K % 2 == 0
    return K // 2


def cohomology_dims(alg, rep, k):
    """(dim ker d_k - rank d_{k-1}) by plain rank arithmetic."""
    cx = _as_complex(alg, rep)
    return cx.space(k).dim - cx.rank_d(k) - cx.rank_d(k - 1)

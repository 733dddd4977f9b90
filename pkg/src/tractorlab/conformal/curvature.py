"""
Levi-Civita connection, curvature and their covariant derivatives at a point.

Index conventions (all arrays, derivative indices trailing where partials
are involved):

    Gamma[i, j, k]      = Gamma^i_{jk}
    Riem[a, b, c, d]    = R_ab^c_d  with  [nabla_a, nabla_b] v^c = R_ab^c_d v^d
    Ric[b, d]           = R_ab^a_d
    P[a, b]             Schouten tensor, J = g^{ab} P_ab
    W[a, b, c, d]       Weyl tensor, same index layout as Riem
    dRiem[e, a, b, c, d] = nabla_e R_ab^c_d
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .charts import MetricChart


class SingularMetric(ValueError):
    pass


@dataclass(frozen=True)
class ConnectionJet:
    g: np.ndarray
    ginv: np.ndarray
    Gamma: np.ndarray
    dGamma: Optional[np.ndarray] = None   # [i, j, k, l] = d_l Gamma^i_jk
    d2Gamma: Optional[np.ndarray] = None  # [i, j, k, l, m] = d_m d_l Gamma^i_jk


def connection_jet(chart: MetricChart, x, order=1) -> ConnectionJet:
    """Christoffel symbols and (order) of their partials from the metric jet."""
    J = chart.metric_jet(x, order + 1)
    g = J.val
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError:
        raise SingularMetric("metric is singular at %s" % (np.asarray(x).tolist(),)) from None
    if not np.all(np.isfinite(ginv)):
        raise SingularMetric("metric is singular")
    dg = J.d1  # [i, j, k] = d_k g_ij

    # Gamma_low[m, j, k] = 1/2 (d_k g_mj + d_j g_mk - d_m g_jk)
    GL = 0.5 * (dg + np.einsum("mkj->mjk", dg) - np.einsum("jkm->mjk", dg))
    Gamma = np.einsum("im,mjk->ijk", ginv, GL)
    if order == 0:
        return ConnectionJet(g, ginv, Gamma)

    d2g = J.d2  # [i, j, k, l]
    dGL = 0.5 * (d2g + np.einsum("mkjl->mjkl", d2g) - np.einsum("jkml->mjkl", d2g))
    dginv = -np.einsum("ia,abl,bj->ijl", ginv, dg, ginv)  # d_l g^ij
    dGamma = np.einsum("iml,mjk->ijkl", dginv, GL) + np.einsum("im,mjkl->ijkl", ginv, dGL)
    if order == 1:
        return ConnectionJet(g, ginv, Gamma, dGamma)

    d3g = J.d3
    d2GL = 0.5 * (d3g + np.einsum("mkjlp->mjklp", d3g) - np.einsum("jkmlp->mjklp", d3g))
    # d_p d_l g^ij
    d2ginv = (-np.einsum("iap,abl,bj->ijlp", dginv, dg, ginv)
              - np.einsum("ia,ablp,bj->ijlp", ginv, d2g, ginv)
              - np.einsum("ia,abl,bjp->ijlp", ginv, dg, dginv))
    d2Gamma = (np.einsum("imlp,mjk->ijklp", d2ginv, GL)
               + np.einsum("iml,mjkp->ijklp", dginv, dGL)
               + np.einsum("imp,mjkl->ijklp", dginv, dGL)
               + np.einsum("im,mjklp->ijklp", ginv, d2GL))
    return ConnectionJet(g, ginv, Gamma, dGamma, d2Gamma)


def gamma_and_schouten_batch(chart: MetricChart, X):
    """Christoffel symbols, metric and Schouten tensor at many points at once.

    Returns (g, ginv, Gamma, P) with a leading batch axis; used by the
    transport integrator, which needs nothing else.
    """
    n = chart.n
    J = chart.metric_jet_batch(X, 2)
    g, dg, d2g = J.val, J.d1, J.d2
    ginv = np.linalg.inv(g)
    GL = 0.5 * (dg + np.einsum("zmkj->zmjk", dg) - np.einsum("zjkm->zmjk", dg))
    Gamma = np.einsum("zim,zmjk->zijk", ginv, GL)
    dGL = 0.5 * (d2g + np.einsum("zmkjl->zmjkl", d2g) - np.einsum("zjkml->zmjkl", d2g))
    dginv = -np.einsum("zia,zabl,zbj->zijl", ginv, dg, ginv)
    dGamma = np.einsum("ziml,zmjk->zijkl", dginv, GL) + np.einsum("zim,zmjkl->zijkl", ginv, dGL)
    t = np.einsum("zcbda->zabcd", dGamma)
    q = np.einsum("zcae,zebd->zabcd", Gamma, Gamma)
    Riem = t - np.swapaxes(t, 1, 2) + q - np.swapaxes(q, 1, 2)
    Ric = np.einsum("zabad->zbd", Riem)
    R = np.einsum("zbd,zbd->z", ginv, Ric)
    P = (Ric - (R / (2.0 * (n - 1)))[:, None, None] * g) / (n - 2)
    return g, ginv, Gamma, P


def christoffel(chart: MetricChart, x) -> np.ndarray:
    return connection_jet(chart, x, 0).Gamma


def _riemann(Gamma, dGamma):
    # R^c_{d a b} = d_a Gamma^c_bd - d_b Gamma^c_ad + Gamma^c_ae Gamma^e_bd - Gamma^c_be Gamma^e_ad
    t = np.einsum("cbda->abcd", dGamma)
    R = t - np.swapaxes(t, 0, 1)
    q = np.einsum("cae,ebd->abcd", Gamma, Gamma)
    return R + q - np.swapaxes(q, 0, 1)


def _d_riemann(Gamma, dGamma, d2Gamma):
    """Partial derivative d_e R_ab^c_d, stored [e, a, b, c, d]."""
    t = np.einsum("cbdae->eabcd", d2Gamma)
    dR = t - np.swapaxes(t, 1, 2)
    q = np.einsum("cafz,fbd->zabcd", dGamma, Gamma) + np.einsum("caf,fbdz->zabcd", Gamma, dGamma)
    return dR + q - np.swapaxes(q, 1, 2)


@dataclass(frozen=True)
class PointCurvature:
    x: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    Gamma: np.ndarray
    Riem: np.ndarray
    Ric: np.ndarray
    R: float
    P: np.ndarray
    J: float
    W: np.ndarray
    dGamma: np.ndarray
    dRiem: Optional[np.ndarray] = None  # covariant, [e, a, b, c, d]
    dP: Optional[np.ndarray] = None     # covariant, [e, a, b] = nabla_e P_ab
    dJ: Optional[np.ndarray] = None

    @property
    def n(self):
        return self.g.shape[0]

    @property
    def P_mixed(self):
        """P_a^b = g^{bc} P_ac."""
        return self.P @ self.ginv


def schouten(Ric, R, g, n):
    return (Ric - R / (2.0 * (n - 1)) * g) / (n - 2)


def kulkarni_part(P, g, n):
    """delta^c_a P_bd - delta^c_b P_ad + P_a^c g_bd - P_b^c g_ad (P_a^c with g^{-1})."""
    d = np.eye(n)
    ginv = np.linalg.inv(g)
    Pm = P @ ginv  # P_a^c
    t = np.einsum("ca,bd->abcd", d, P) + np.einsum("ac,bd->abcd", Pm, g)
    return t - np.swapaxes(t, 0, 1)


def curvature_suite(chart: MetricChart, x, derivatives=False) -> PointCurvature:
    """All curvature quantities at x; with ``derivatives`` also nabla Riem, nabla P, nabla J."""
    x = chart.check_point(x)
    n = chart.n
    cj = connection_jet(chart, x, 2 if derivatives else 1)
    Riem = _riemann(cj.Gamma, cj.dGamma)
    Ric = np.einsum("abad->bd", Riem)
    R = float(np.einsum("bd,bd->", cj.ginv, Ric))
    P = schouten(Ric, R, cj.g, n)
    J = float(np.einsum("ab,ab->", cj.ginv, P))
    W = Riem - kulkarni_part(P, cj.g, n)
    dRiem = dP = dJ = None
    if derivatives:
        G = cj.Gamma
        pR = _d_riemann(G, cj.dGamma, cj.d2Gamma)
        dRiem = (pR
                 - np.einsum("fea,fbcd->eabcd", G, Riem)
                 - np.einsum("feb,afcd->eabcd", G, Riem)
                 + np.einsum("cef,abfd->eabcd", G, Riem)
                 - np.einsum("fed,abcf->eabcd", G, Riem))
        dRic = np.einsum("eabad->ebd", dRiem)
        dR = np.einsum("bd,ebd->e", cj.ginv, dRic)
        dP = (dRic - np.einsum("e,bd->ebd", dR, cj.g) / (2.0 * (n - 1))) / (n - 2)
        dJ = np.einsum("ab,eab->e", cj.ginv, dP)
    return PointCurvature(x, cj.g, cj.ginv, cj.Gamma, Riem, Ric, R, P, J, W, cj.dGamma, dRiem, dP, dJ)


def metric_compatibility(chart, x) -> float:
    """max |nabla_k g_ij| computed from the metric jet and Gamma."""
    J = chart.metric_jet(x, 1)
    G = christoffel(chart, x)
    nab = J.d1 - np.einsum("lki,lj->ijk", G, J.val) - np.einsum("lkj,il->ijk", G, J.val)
    return float(np.max(np.abs(nab)))


def symmetry_residuals(pc: PointCurvature) -> dict:
    g = pc.g
    Rl = np.einsum("abed,ec->abcd", pc.Riem, g)  # R_ab c d with c lowered: R_{abcd}
    return {
        "gamma_symmetry": float(np.max(np.abs(pc.Gamma - np.swapaxes(pc.Gamma, 1, 2)))),
        "riemann_ab_antisym": float(np.max(np.abs(pc.Riem + np.swapaxes(pc.Riem, 0, 1)))),
        "riemann_cd_antisym": float(np.max(np.abs(Rl + np.swapaxes(Rl, 2, 3)))),
        "riemann_pair_sym": float(np.max(np.abs(Rl - np.transpose(Rl, (2, 3, 0, 1))))),
        "ricci_symmetry": float(np.max(np.abs(pc.Ric - pc.Ric.T))),
        "weyl_trace": float(np.max(np.abs(np.einsum("abad->bd", pc.W)))),
    }


# ---------------------------------------------------------------------------
# covariant derivatives of a scalar


def scalar_covariant(fjet, Gamma, dGamma=None):
    """(grad, nabla nabla f, nabla nabla nabla f) from a scalar jet.

    T[a, b, c] = nabla_a nabla_b nabla_c f when the jet has order 3.
    """
    f1 = fjet.d1
    H = fjet.d2 - np.einsum("ebc,e->bc", Gamma, f1)
    if fjet.d3 is None or dGamma is None:
        return f1, H, None
    # d_a H_bc = f_bca - d_a Gamma^e_bc f_e - Gamma^e_bc f_ea
    dH = np.einsum("bca->abc", fjet.d3) - np.einsum("ebca,e->abc", dGamma, f1) \
        - np.einsum("ebc,ea->abc", Gamma, fjet.d2)
    T = dH - np.einsum("eab,ec->abc", Gamma, H) - np.einsum("eac,be->abc", Gamma, H)
    return f1, H, T


def bianchi_residuals(chart, x, test_scalar=None) -> dict:
    """Residuals of the first and second Bianchi identities, the contracted
    identity nabla^a P_ac = nabla_c J, and [nabla_c, Laplacian] f = R_cb^b_d nabla^d f."""
    pc = curvature_suite(chart, x, derivatives=True)
    R, dR = pc.Riem, pc.dRiem
    first = R + np.einsum("bdca->abcd", R) + np.einsum("dacb->abcd", R)
    second = dR + np.einsum("abecd->eabcd", dR) + np.einsum("beacd->eabcd", dR)
    divP = np.einsum("ea,eac->c", pc.ginv, pc.dP) - pc.dJ
    scale = 1.0 + float(np.max(np.abs(R)))
    out = {
        "first_bianchi": float(np.max(np.abs(first))) / scale,
        "second_bianchi": float(np.max(np.abs(second))) / (1.0 + float(np.max(np.abs(dR)))),
        "contracted_bianchi": float(np.max(np.abs(divP))),
    }
    if test_scalar is not None:
        cj = connection_jet(chart, x, 1)
        f1, H, T = scalar_covariant(test_scalar.jet(x, 3), cj.Gamma, cj.dGamma)
        # nabla_c (g^ab f_ab) - g^ab nabla_a nabla_b nabla_c f
        lhs = np.einsum("ab,cab->c", pc.ginv, T) - np.einsum("ab,abc->c", pc.ginv, T)
        grad_up = pc.ginv @ f1
        rhs = np.einsum("cbbd,d->c", R, grad_up)
        out["laplacian_commutator"] = float(np.max(np.abs(lhs - rhs)))
    return out

"""Curvature of a metric jet: Christoffels, Riemann, Ricci, Weyl, grad Ricci.

Conventions
-----------
Signature (-,+,+,+). The mixed tensor
``Rm[h,i,j,k] = d_j G^h_ik - d_k G^h_ij + G^h_jp G^p_ik - G^h_kp G^p_ij``
is the usual one; Ricci is ``R_ij = Rm[p,i,p,j]`` (positive on spheres) and
``[nabla_l, nabla_m] w_i = -Rm[p,i,l,m] w_p``.

The fully covariant ``riemann`` stored on a bundle uses the index layout
``riemann[h,i,j,k] = g_ia Rm[a,h,j,k]``, for which a space of constant
curvature ``k`` reads ``k (g_hk g_ij - g_hj g_ik)`` and ``g^ij riemann[h,i,j,k]``
is the Ricci tensor.

All derivatives come from jets, so grad Ricci (third metric derivatives)
carries no truncation error.
"""

from dataclasses import dataclass

import numpy as np

from . import jet
from .metric import eval_metric

# Test hook for the verification harness (see ``qcst.verify``): when
# "riemann-sign" is present the Riemann tensor is computed with the wrong sign.
FAULTS = set()


def norm(t):
    """Euclidean norm over all chart components."""
    return float(np.sqrt(np.sum(np.square(t))))


@dataclass(frozen=True)
class CurvatureBundle:
    metric: object
    christoffel_jet: np.ndarray  # (35, h, i, j), valid to degree 2
    mixed_riemann: np.ndarray  # Rm[h, i, j, k]
    riemann: np.ndarray
    ricci: np.ndarray
    ricci_jet: np.ndarray  # valid to degree 1
    scalar: float
    scalar_jet: np.ndarray  # valid to degree 1
    weyl: np.ndarray
    grad_ricci: np.ndarray  # [l, i, j] = nabla_l R_ij
    riem_on_ricci: np.ndarray  # [i, j, l, m]

    @property
    def g(self):
        return self.metric.g[0]

    @property
    def ginv(self):
        return self.metric.ginv[0]

    @property
    def point(self):
        return self.metric.point

    @property
    def gamma(self):
        """Christoffel symbols ``G^h_ij``."""
        return self.christoffel_jet[0]

    @property
    def dgamma(self):
        """``[l, h, i, j] = d_l G^h_ij``."""
        return np.stack([jet.partial(self.christoffel_jet, v)[0] for v in range(4)])

    @property
    def ddgamma(self):
        """``[l, m, h, i, j] = d_l d_m G^h_ij``."""
        first = [jet.partial(self.christoffel_jet, v) for v in range(4)]
        return np.stack([np.stack([jet.partial(d, m)[0] for m in range(4)]) for d in first])

    @property
    def scalar_gradient(self):
        return np.array([jet.partial(self.scalar_jet, v)[0] for v in range(4)])


def christoffel(mj):
    """``G^h_ij`` as a jet array ``(35, 4, 4, 4)`` valid to degree 2."""
    dg = jet.gradient(mj.g)  # [z, c, a, b] = d_c g_ab
    lower = (
        np.einsum("zikj->zkij", dg)
        + np.einsum("zjki->zkij", dg)
        - dg
    )
    return 0.5 * jet.contract("hk,kij->hij", mj.ginv, lower)


def mixed_riemann_jet(gam):
    """``Rm[h,i,j,k]`` as a jet valid to degree 1."""
    dgam = jet.gradient(gam)  # [z, l, h, i, j]
    rm = (
        np.einsum("zjhik->zhijk", dgam)
        - np.einsum("zkhij->zhijk", dgam)
        + jet.contract("hjp,pik->hijk", gam, gam)
        - jet.contract("hkp,pij->hijk", gam, gam)
    )
    if "riemann-sign" in FAULTS:
        rm = -rm
    return rm


def weyl_tensor(riemann, ricci, scalar, g):
    """Trace-free part of ``riemann`` (layout described in the module docstring)."""
    gg = np.einsum("hk,ij->hijk", g, g) - np.einsum("hj,ik->hijk", g, g)
    gr = (
        np.einsum("hk,ij->hijk", g, ricci)
        - np.einsum("hj,ik->hijk", g, ricci)
        + np.einsum("ij,hk->hijk", g, ricci)
        - np.einsum("ik,hj->hijk", g, ricci)
    )
    return riemann - 0.5 * gr + (scalar / 6.0) * gg


def riemann_on_ricci(mixed, ricci):
    """``Q_ijlm = (nabla_l nabla_m - nabla_m nabla_l) R_ij`` via the Ricci identity."""
    return -np.einsum("pilm,pj->ijlm", mixed, ricci) - np.einsum("pjlm,ip->ijlm", mixed, ricci)


def curvature(mj):
    """All curvature data of a ``MetricJet`` at its point."""
    gam = christoffel(mj)
    rm = mixed_riemann_jet(gam)
    ricci_jet = np.einsum("zpipj->zij", rm)
    scalar_jet = jet.contract("ij,ij->", mj.ginv, ricci_jet)
    rm0 = rm[0]
    g0 = mj.g[0]
    lowered = np.einsum("ah,hijk->aijk", g0, rm0)
    riemann = np.einsum("ihjk->hijk", lowered)
    ricci = ricci_jet[0]
    ricci = 0.5 * (ricci + ricci.T)
    scalar = float(scalar_jet[0])
    d_ricci = np.stack([jet.partial(ricci_jet, v)[0] for v in range(4)])  # [l, i, j]
    gam0 = gam[0]
    grad_ricci = (
        d_ricci
        - np.einsum("pli,pj->lij", gam0, ricci)
        - np.einsum("plj,ip->lij", gam0, ricci)
    )
    return CurvatureBundle(
        metric=mj,
        christoffel_jet=gam,
        mixed_riemann=rm0,
        riemann=riemann,
        ricci=ricci,
        ricci_jet=ricci_jet,
        scalar=scalar,
        scalar_jet=scalar_jet,
        weyl=weyl_tensor(riemann, ricci, scalar, g0),
        grad_ricci=grad_ricci,
        riem_on_ricci=riemann_on_ricci(rm0, ricci),
    )


def curvature_at(spec, point):
    return curvature(eval_metric(spec, point))


def bianchi_residual(bundle):
    """Relative size of ``nabla_i (R^i_j - R/2 delta^i_j)``."""
    div = np.einsum("il,lij->j", bundle.ginv, bundle.grad_ricci) - 0.5 * bundle.scalar_gradient
    scale = max(1.0, norm(bundle.grad_ricci), norm(bundle.scalar_gradient))
    return norm(div) / scale

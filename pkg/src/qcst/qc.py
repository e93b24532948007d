"""Quasi-constant sectional curvature: detection and reconstruction.

A metric is QC at a point when its curvature has the form

    R_hijk = gamma (g_hk g_ij - g_hj g_ik)
             + mu (g_hk A_i A_j + g_ij A_h A_k - g_hj A_i A_k - g_ik A_h A_j)

with ``A`` unit timelike. Contracting gives ``R_ij = (3 gamma - mu) g_ij +
2 mu A_i A_j`` and ``R = 6 (2 gamma - mu)``, so the mixed Ricci operator has
trace-free part ``B = (mu/2) Id + 2 mu P`` with ``P = A (x) A`` and
``P^2 = -P``. Detection inverts that split in closed form.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import jet
from .curvature import norm
from .exceptions import MissingGeneratorField, NonDiagonalizableRicci

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class QCReport:
    is_qc: bool
    gamma: float
    mu: float
    generator_cov: Optional[np.ndarray]
    generator: Optional[np.ndarray]  # contravariant A^i
    riemann_residual_rel: float
    weyl_norm_rel: float
    constant_curvature: bool
    rank1_residual: float
    nu: float
    tol: float
    column: Optional[int] = None  # column of P used to read off A


def qc_scalars_from_invariants(R, nu):
    """``(gamma, mu)`` from the scalar curvature and ``nu = R_ij A^i A^j``."""
    return (R + 2.0 * nu) / 6.0, (R + 4.0 * nu) / 6.0


def reconstruct_riemann(gamma, mu, A_cov, g):
    g = np.asarray(g, dtype=float)
    a = np.asarray(A_cov, dtype=float)
    gg = np.einsum("hk,ij->hijk", g, g) - np.einsum("hj,ik->hijk", g, g)
    aa = np.outer(a, a)
    ga = (
        np.einsum("hk,ij->hijk", g, aa)
        + np.einsum("ij,hk->hijk", g, aa)
        - np.einsum("hj,ik->hijk", g, aa)
        - np.einsum("ik,hj->hijk", g, aa)
    )
    return gamma * gg + mu * ga


def weyl_norm_rel(bundle):
    scale = norm(bundle.riemann)
    return 0.0 if scale == 0.0 else norm(bundle.weyl) / max(1e-30, scale)


def _rel(diff, ref):
    r = norm(ref)
    return 0.0 if r == 0.0 and norm(diff) == 0.0 else norm(diff) / max(1e-30, r)


def _rank1(B, mu):
    eye = np.eye(4)
    P = (B - 0.5 * mu * eye) / (2.0 * mu)
    return P, norm(P @ P + P) / max(1.0, norm(P))


def detect_qc(bundle, tol=DEFAULT_TOL):
    """Extract ``(gamma, mu, A)`` from a curvature bundle."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    g, ginv = bundle.g, bundle.ginv
    M = ginv @ bundle.ricci
    R = float(np.trace(M))
    B = M - 0.25 * R * np.eye(4)
    weyl = weyl_norm_rel(bundle)

    if norm(B) <= tol * max(1.0, norm(M)):
        gamma = R / 12.0
        recon = reconstruct_riemann(gamma, 0.0, np.zeros(4), g)
        resid = _rel(bundle.riemann - recon, bundle.riemann)
        return QCReport(
            is_qc=weyl <= tol and resid <= tol,
            gamma=gamma,
            mu=0.0,
            generator_cov=None,
            generator=None,
            riemann_residual_rel=resid,
            weyl_norm_rel=weyl,
            constant_curvature=True,
            rank1_residual=0.0,
            nu=float("nan"),
            tol=tol,
        )

    mu0 = float(np.sqrt(abs(np.trace(B @ B)) / 3.0))
    if mu0 <= tol * max(1.0, norm(M)):
        # trace-free part is nonzero but nilpotent (null-dust type)
        raise NonDiagonalizableRicci("trace-free Ricci operator is nilpotent; no timelike eigenvector split")
    candidates = []
    for mu in (mu0, -mu0):
        P, res = _rank1(B, mu)
        candidates.append((res, mu, P))
    res, mu, P = min(candidates, key=lambda c: c[0])
    if res > 1e3 * tol:
        raise NonDiagonalizableRicci(
            f"Ricci operator has no unit-timelike rank-one split (rank-one residual {res:.3e})"
        )

    col = int(np.argmax(np.sum(P * P, axis=0)))
    v = P[:, col]
    n2 = float(v @ g @ v)
    if not n2 < 0:
        raise NonDiagonalizableRicci("rank-one factor of the Ricci operator is not timelike")
    A = v / np.sqrt(-n2)
    if A[0] < 0:
        A = -A
    A_cov = g @ A
    gamma = (R + 6.0 * mu) / 12.0
    recon = reconstruct_riemann(gamma, mu, A_cov, g)
    resid = _rel(bundle.riemann - recon, bundle.riemann)
    return QCReport(
        is_qc=resid <= tol and res <= tol and weyl <= tol,
        gamma=gamma,
        mu=mu,
        generator_cov=A_cov,
        generator=A,
        riemann_residual_rel=resid,
        weyl_norm_rel=weyl,
        constant_curvature=False,
        rank1_residual=res,
        nu=float(A @ bundle.ricci @ A),
        tol=tol,
        column=col,
    )


@dataclass(frozen=True)
class QCField:
    """Jet-valued QC data near the point, valid to degree 1."""

    generator: np.ndarray  # (35, 4) contravariant
    gamma: np.ndarray  # (35,)
    mu: np.ndarray  # (35,)


def qc_field(bundle, report):
    """Repeat the detector on jet-valued Ricci so ``A``, ``gamma``, ``mu`` carry gradients."""
    if report.generator is None:
        raise MissingGeneratorField("no generator at a constant-curvature point")
    mj = bundle.metric
    M = jet.contract("ik,kj->ij", mj.ginv, bundle.ricci_jet)
    R = np.einsum("zii->z", M)
    eye = np.eye(4)
    B = M - 0.25 * R[:, None, None] * eye
    tr = jet.contract("ij,ji->", B, B)
    mu = np.sign(report.mu) * jet.sqrt(tr / 3.0)
    P = jet.mul(B - 0.5 * mu[:, None, None] * eye, jet.reciprocal(2.0 * mu)[:, None, None])
    v = P[:, :, report.column]
    n2 = jet.contract("i,i->", v, jet.contract("ij,j->i", mj.g, v))
    A = jet.mul(v, jet.reciprocal(jet.sqrt(-n2))[:, None])
    if A[0, 0] < 0:
        A = -A
    gamma = (R + 6.0 * mu) / 12.0
    return QCField(A, gamma, mu)

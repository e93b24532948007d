"""Finite-difference curvature, independent of the jet machinery.

Everything here works from plain float metric values (``metric_values``) and
central differences, with explicit loops over index ranges. It exists only to
cross-check the jet pipeline, so it favours obviousness over speed.
"""

import numpy as np

from .metric import metric_values

STEP = 1e-4


def _shift(x, c, h):
    y = list(x)
    y[c] += h
    return y


def christoffel_fd(spec, x, h=STEP):
    g = metric_values(spec, x)
    ginv = np.linalg.inv(g)
    dg = np.zeros((4, 4, 4))  # [c, a, b] = d_c g_ab
    for c in range(4):
        dg[c] = (metric_values(spec, _shift(x, c, h)) - metric_values(spec, _shift(x, c, -h))) / (2 * h)
    gam = np.zeros((4, 4, 4))
    for a in range(4):
        for i in range(4):
            for j in range(4):
                total = 0.0
                for k in range(4):
                    total += ginv[a, k] * (dg[i, k, j] + dg[j, k, i] - dg[k, i, j])
                gam[a, i, j] = 0.5 * total
    return gam


def curvature_fd(spec, x, h=STEP):
    """Return ``(mixed Rm, covariant riemann, ricci, scalar, christoffel)``.

    Layouts match ``qcst.curvature``.
    """
    x = [float(v) for v in x]
    g = metric_values(spec, x)
    ginv = np.linalg.inv(g)
    gam = christoffel_fd(spec, x, h)
    dgam = np.zeros((4, 4, 4, 4))  # [l, a, i, j]
    for l in range(4):
        dgam[l] = (christoffel_fd(spec, _shift(x, l, h), h) - christoffel_fd(spec, _shift(x, l, -h), h)) / (2 * h)
    rm = np.zeros((4, 4, 4, 4))
    for a in range(4):
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    val = dgam[j, a, i, k] - dgam[k, a, i, j]
                    for p in range(4):
                        val += gam[a, j, p] * gam[p, i, k] - gam[a, k, p] * gam[p, i, j]
                    rm[a, i, j, k] = val
    riemann = np.zeros((4, 4, 4, 4))
    for hh in range(4):
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    riemann[hh, i, j, k] = sum(g[i, a] * rm[a, hh, j, k] for a in range(4))
    ricci = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            ricci[i, j] = sum(rm[p, i, p, j] for p in range(4))
    scalar = float(np.sum(ginv * ricci))
    return rm, riemann, ricci, scalar, gam


def grad_ricci_fd(spec, x, h_outer=1e-3, h=STEP):
    """``nabla_l R_ij`` by differencing finite-difference Ricci tensors."""
    x = [float(v) for v in x]
    _, _, ricci, _, gam = curvature_fd(spec, x, h)
    d_ricci = np.zeros((4, 4, 4))
    for l in range(4):
        up = curvature_fd(spec, _shift(x, l, h_outer), h)[2]
        down = curvature_fd(spec, _shift(x, l, -h_outer), h)[2]
        d_ricci[l] = (up - down) / (2 * h_outer)
    out = np.zeros((4, 4, 4))
    for l in range(4):
        for i in range(4):
            for j in range(4):
                val = d_ricci[l, i, j]
                for p in range(4):
                    val -= gam[p, l, i] * ricci[p, j] + gam[p, l, j] * ricci[i, p]
                out[l, i, j] = val
    return out


def commutator_fd(rm, ricci):
    """``-Rm[p,i,l,m] R_pj - Rm[p,j,l,m] R_ip`` assembled with loops."""
    q = np.zeros((4, 4, 4, 4))
    for i in range(4):
        for j in range(4):
            for l in range(4):
                for m in range(4):
                    q[i, j, l, m] = -sum(rm[p, i, l, m] * ricci[p, j] + rm[p, j, l, m] * ricci[i, p] for p in range(4))
    return q


def einstein_stress_fd(spec, x, kappa=1.0, h=STEP):
    """``(R_ij - R g_ij / 2) / kappa^2`` from finite-difference curvature."""
    _, _, ricci, scalar, _ = curvature_fd(spec, x, h)
    g = metric_values(spec, x)
    return (ricci - 0.5 * scalar * g) / kappa ** 2

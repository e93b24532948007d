"""Geometric checks behind the structure theorems.

All deviations are relative norms of chart components. Quantities that are
pure rounding noise (a gradient of a Ricci tensor that is parallel, say) are
treated as exact zeros before normalising, otherwise 0/0 would turn noise
into an O(1) "deviation".
"""

from dataclasses import dataclass, field

import numpy as np

from . import jet
from .curvature import norm
from .exceptions import MissingGeneratorField, NotUnitTimelike
from .metric import generator_jet
from .qc import DEFAULT_TOL, qc_field, weyl_norm_rel

# ||nabla Ric|| below this fraction of max(1, ||Ric||) is rounding noise.
NOISE_FLOOR = 1e-12


def ricci_symmetric_deviation(bundle):
    return norm(bundle.grad_ricci) / max(1.0, norm(bundle.ricci))


def codazzi_deviation(bundle):
    """``||nabla_l R_hk - nabla_k R_hl|| / ||nabla Ric||``; zero when Ricci is parallel."""
    grad = bundle.grad_ricci  # [l, h, k]
    size = norm(grad)
    if size <= NOISE_FLOOR * max(1.0, norm(bundle.ricci)):
        return 0.0
    diff = grad - np.einsum("lhk->khl", grad)
    return norm(diff) / max(1e-30, size)


def semisymmetry_deviation(bundle):
    """``||Q|| / (||Riemann|| max(1, ||Ric||))`` with ``Q`` the Ricci-identity commutator."""
    scale = norm(bundle.riemann) * max(1.0, norm(bundle.ricci))
    q = norm(bundle.riem_on_ricci)
    return 0.0 if q == 0.0 else q / max(1e-30, scale)


def conformally_flat(bundle, tol=DEFAULT_TOL):
    """Petrov type O test: vanishing Weyl tensor relative to Riemann."""
    return weyl_norm_rel(bundle) <= tol


@dataclass(frozen=True)
class GeneratorChecks:
    div_A: float
    killing_dev: float
    vorticity_dev: float
    gamma_along_A: float = float("nan")


def covariant_derivative_of_generator(bundle, A):
    """``(nabla_i A_j, div A, A^i, A_j)`` for a jet-valued contravariant field ``A``."""
    mj = bundle.metric
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape != (jet.NCOEF, 4):
        raise MissingGeneratorField("generator checks need a jet-valued field (35, 4), not point values")
    a_up = A[0]
    norm2 = float(a_up @ bundle.g @ a_up)
    if abs(norm2 + 1.0) > 1e-8:
        raise NotUnitTimelike(f"generator has g(A, A) = {norm2:.12g}, expected -1")
    A_cov = jet.contract("ij,j->i", mj.g, A)
    a_dn = A_cov[0]
    gam = bundle.gamma
    d_cov = np.stack([jet.partial(A_cov, v)[0] for v in range(4)])  # [i, j] = d_i A_j
    nabla = d_cov - np.einsum("pij,p->ij", gam, a_dn)
    d_up = np.stack([jet.partial(A, v)[0] for v in range(4)])  # [i, h] = d_i A^h
    div = float(np.trace(d_up) + np.einsum("hhp,p->", gam, a_up))
    return nabla, div, a_up, a_dn


def generator_checks(bundle, A, gamma_field=None):
    """Divergence, Killing and vorticity residuals of the generator field ``A``."""
    nabla, div, _, a_dn = covariant_derivative_of_generator(bundle, A)
    scale = max(1.0, norm(nabla))
    killing = norm(nabla + nabla.T) / scale
    omega = 0.5 * (nabla - nabla.T)
    wedge = (
        np.einsum("i,jk->ijk", a_dn, omega)
        + np.einsum("j,ki->ijk", a_dn, omega)
        + np.einsum("k,ij->ijk", a_dn, omega)
    ) / 3.0
    vort = norm(wedge) / scale
    along = float("nan")
    if gamma_field is not None:
        grad = np.array([jet.partial(gamma_field, v)[0] for v in range(4)])
        along = float(grad @ np.asarray(A)[0])
    return GeneratorChecks(div, killing, vort, along)


def generator_field(bundle, report=None, spec=None):
    """Jet-valued generator: the metric's hint if present, else the QC extraction."""
    if spec is not None and spec.generator_hint is not None:
        return generator_jet(spec, bundle.point)
    if report is not None and report.generator is not None:
        return qc_field(bundle, report).generator
    raise MissingGeneratorField("no generator hint and no QC generator at this point")


@dataclass(frozen=True)
class DiagnosticsReport:
    codazzi_dev: float
    ricci_symmetric_dev: float
    semisymmetry_dev: float
    weyl_rel: float
    killing_dev: float
    vorticity_dev: float
    div_A: float
    tol: float
    gamma_along_A: float = float("nan")
    flags: dict = field(default_factory=dict)


def diagnose(bundle, report=None, spec=None, tol=DEFAULT_TOL):
    """Run every check; generator checks are NaN when no generator field exists."""
    gen = GeneratorChecks(float("nan"), float("nan"), float("nan"))
    field_A = None
    try:
        field_A = generator_field(bundle, report, spec)
    except MissingGeneratorField:
        pass
    if field_A is not None:
        gamma_field = None
        if report is not None and report.generator is not None:
            try:
                gamma_field = qc_field(bundle, report).gamma
            except (ArithmeticError, MissingGeneratorField):
                gamma_field = None
        gen = generator_checks(bundle, field_A, gamma_field)
    devs = {
        "codazzi": codazzi_deviation(bundle),
        "ricci_symmetric": ricci_symmetric_deviation(bundle),
        "semisymmetric": semisymmetry_deviation(bundle),
        "conformally_flat": weyl_norm_rel(bundle),
        "killing": gen.killing_dev,
        "irrotational": gen.vorticity_dev,
    }
    flags = {name: bool(value <= tol) for name, value in devs.items()}
    return DiagnosticsReport(
        codazzi_dev=devs["codazzi"],
        ricci_symmetric_dev=devs["ricci_symmetric"],
        semisymmetry_dev=devs["semisymmetric"],
        weyl_rel=devs["conformally_flat"],
        killing_dev=gen.killing_dev,
        vorticity_dev=gen.vorticity_dev,
        div_A=gen.div_A,
        tol=tol,
        gamma_along_A=gen.gamma_along_A,
        flags=flags,
    )

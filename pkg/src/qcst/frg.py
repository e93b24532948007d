"""F(R) gravity at constant scalar curvature and the energy-condition scan.

For a QC metric ``R = 6 (2 gamma - mu)``. Two routes give the effective
density and pressure: the direct closed form (``effective_from_qc``) and the
composition of the matter fluid (``fr_pressure_density``) with the curvature
correction (``effective_quantities``). They are coded separately on purpose
so each checks the other.
"""

from dataclasses import dataclass, field
import functools
import math
import os
import tempfile
from typing import Callable

import mpmath

from .exceptions import BadTermCount, DomainError, EmptyGrid
from .fluid import check_kappa

CSV_HEADER = ("mu", "gamma", "R", "F", "F_R", "sigma_eff", "p_eff", "nec", "wec", "dec", "sec")
EC_NAMES = ("NEC", "WEC", "DEC", "SEC")


@dataclass(frozen=True)
class FRModel:
    label: str
    F: Callable[[float], float]
    F_R: Callable[[float], float]
    valid_domain: tuple = (-math.inf, math.inf)  # open interval

    def contains(self, R):
        lo, hi = self.valid_domain
        return lo < R < hi

    def check(self, R):
        if not self.contains(R):
            raise DomainError(f"R = {R!r} outside the domain {self.valid_domain} of model {self.label}")
        return R


def pure_gr():
    """``F(R) = R``: reduces everything to the Einstein-equation fluid."""
    return FRModel("GR", lambda R: float(R), lambda R: 1.0)


_DPS = 40


@functools.lru_cache(maxsize=65536)
def _model_a_pair(R, terms):
    with mpmath.workdps(_DPS):
        r = mpmath.mpf(R)
        e, lg = mpmath.exp(r), mpmath.log(r)
        series_f = mpmath.fsum(r ** l / (l * mpmath.factorial(l)) for l in range(2, terms + 1))
        series_d = mpmath.fsum(r ** (l - 1) / mpmath.factorial(l) for l in range(2, terms + 1))
        f = e * lg - lg - r - series_f
        d = e * lg + e / r - 1 / r - 1 - series_d
        return float(f), float(d)


def model_a(terms=64):
    """``F = e^R log R - log R - R - sum_{l=2..L} R^l / (l l!)`` with ``L = terms``.

    Evaluated in 40-digit arithmetic and rounded once, so the truncated
    derivative tracks ``e^R log R`` down to the last float bit.
    """
    if isinstance(terms, bool) or int(terms) != terms or terms < 2:
        raise BadTermCount(f"Model A needs an integer term count >= 2, got {terms!r}")
    terms = int(terms)

    def F(R):
        return _model_a_pair(float(R), terms)[0]

    def F_R(R):
        return _model_a_pair(float(R), terms)[1]

    return FRModel(f"A(L={terms})", F, F_R, (0.0, math.inf))


MODELS = {"A": model_a, "GR": lambda terms=None: pure_gr()}


def get_model(name, terms=64):
    try:
        build = MODELS[name]
    except KeyError:
        raise DomainError(f"unknown F(R) model {name!r}; choose from {sorted(MODELS)}") from None
    return build(terms)


def qc_scalar_curvature(gamma, mu):
    return 6.0 * (2.0 * gamma - mu)


def fr_pressure_density(gamma, mu, model, kappa=1.0):
    """Matter ``(p, sigma)`` of a QC metric solving the constant-R field equation."""
    k2 = check_kappa(kappa) ** 2
    R = model.check(qc_scalar_curvature(gamma, mu))
    f, fr = model.F(R), model.F_R(R)
    p = (3.0 * gamma - mu) * fr / k2 - f / (2.0 * k2)
    sigma = 3.0 * (mu - gamma) * fr / k2 + f / (2.0 * k2)
    return p, sigma


def effective_quantities(p, sigma, R, model, kappa=1.0):
    """``(p_eff, sigma_eff)`` from matter quantities at constant ``R``."""
    k2 = check_kappa(kappa) ** 2
    model.check(R)
    shift = (model.F(R) - R * model.F_R(R)) / (2.0 * k2)
    return p + shift, sigma - shift


def effective_from_qc(gamma, mu, model, kappa=1.0):
    """``(sigma_eff, p_eff)`` straight from the QC scalars.

    Both follow from contracting ``F_R G_ij = kappa^2 T^eff_ij`` with the QC
    Einstein tensor: ``sigma_eff = (6 mu - 6 gamma + R) F_R / (2 kappa^2)``,
    which equals ``3 gamma F_R / kappa^2``, and ``p_eff`` as coded below.
    """
    k2 = check_kappa(kappa) ** 2
    R = model.check(qc_scalar_curvature(gamma, mu))
    fr = model.F_R(R)
    sigma_eff = (6.0 * mu - 6.0 * gamma + R) * fr / (2.0 * k2)
    p_eff = (6.0 * gamma - 2.0 * mu - R) * fr / (2.0 * k2)
    return sigma_eff, p_eff


def ec_flags_eff(sigma_eff, p_eff):
    """NEC/WEC/DEC/SEC on effective quantities, each with a ``1e-9`` relative slack."""
    eps = 1e-9 * max(1.0, abs(sigma_eff), abs(p_eff))
    nec = sigma_eff + p_eff >= -eps
    return {
        "NEC": bool(nec),
        "WEC": bool(sigma_eff >= -eps and nec),
        "DEC": bool(sigma_eff >= -eps and nec and sigma_eff - p_eff >= -eps),
        "SEC": bool(sigma_eff + 3.0 * p_eff >= -eps),
    }


@dataclass(frozen=True)
class ECRecord:
    mu: float
    gamma: float
    R: float
    F: float
    F_R: float
    sigma_eff: float
    p_eff: float
    nec: bool
    wec: bool
    dec: bool
    sec: bool


def ec_record(mu, gamma, model, kappa=1.0):
    sigma_eff, p_eff = effective_from_qc(gamma, mu, model, kappa)
    R = qc_scalar_curvature(gamma, mu)
    flags = ec_flags_eff(sigma_eff, p_eff)
    return ECRecord(
        mu, gamma, R, model.F(R), model.F_R(R), sigma_eff, p_eff,
        flags["NEC"], flags["WEC"], flags["DEC"], flags["SEC"],
    )


@dataclass
class ScanResult:
    records: list
    n_cells: int
    n_skipped: int
    shape: tuple
    fractions: dict = field(default_factory=dict)

    def summary_lines(self):
        lines = [
            f"grid: {self.shape[0]} x {self.shape[1]} = {self.n_cells} cells",
            f"evaluated: {len(self.records)}",
            f"skipped (R outside model domain): {self.n_skipped}",
        ]
        for name in EC_NAMES:
            lines.append(f"{name} satisfied: {self.fractions[name]:.6f}")
        return lines


def grid_values(lo, hi, n):
    """``n`` evenly spaced values from ``lo`` to ``hi`` inclusive.

    Each value is one rounding of ``(lo (n-1-k) + hi k) / (n-1)``, so points
    that coincide in exact arithmetic also coincide in floating point.
    """
    lo, hi = float(lo), float(hi)
    if n < 2:
        raise EmptyGrid(f"need at least 2 steps per axis, got {n}")
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise EmptyGrid("grid bounds must be finite")
    m = n - 1
    return [(lo * (m - k) + hi * k) / m for k in range(n)]


def scan_grid(mu_range, gamma_range, steps, model, kappa=1.0):
    """Evaluate the effective energy conditions on a (mu, gamma) grid.

    Rows are mu-major, gamma-minor. Cells whose ``R`` falls outside the
    model's domain are counted and left out, never clamped.
    """
    check_kappa(kappa)
    mu_steps, gamma_steps = (steps, steps) if isinstance(steps, int) else steps
    mus = grid_values(*mu_range, mu_steps)
    gammas = grid_values(*gamma_range, gamma_steps)
    records = []
    skipped = 0
    for mu in mus:
        for gamma in gammas:
            if not model.contains(qc_scalar_curvature(gamma, mu)):
                skipped += 1
                continue
            records.append(ec_record(mu, gamma, model, kappa))
    if not records:
        raise EmptyGrid(f"all {len(mus) * len(gammas)} cells fall outside the model domain")
    n = len(records)
    fractions = {name: sum(getattr(r, name.lower()) for r in records) / n for name in EC_NAMES}
    return ScanResult(records, len(mus) * len(gammas), skipped, (len(mus), len(gammas)), fractions)


def _fmt(x):
    if isinstance(x, bool):
        return "1" if x else "0"
    return "%.17g" % x


def format_csv(records):
    lines = [",".join(CSV_HEADER)]
    for r in records:
        lines.append(",".join(_fmt(getattr(r, name)) for name in CSV_HEADER))
    return "\n".join(lines) + "\n"


def write_csv(records, path):
    """Write records atomically: a temp file in the target directory, then rename."""
    text = format_csv(records)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".ec-scan-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

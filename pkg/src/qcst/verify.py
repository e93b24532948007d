"""Self-verification suites behind ``qcst verify``.

Each check yields one ``Check``; ``format_check`` renders it as
``PASS|FAIL <suite>.<check> <measured> <bound>``. Every check passes when
``measured <= bound`` so the output can be filtered mechanically.
"""

from dataclasses import dataclass
import math
import random
from types import SimpleNamespace

import numpy as np

from . import expr, jet
from .curvature import bianchi_residual, curvature_at, norm, weyl_tensor
from .diagnostics import diagnose, generator_checks, generator_field
from .exceptions import ExprError, QCSTError
from .fluid import fluid_from_qc, fluid_projections, stress_energy_from_einstein
from .frg import (
    effective_from_qc, effective_quantities, fr_pressure_density, model_a,
    pure_gr, qc_scalar_curvature, scan_grid,
)
from .metric import CATALOG, builtin, generator_jet
from .oracle import curvature_fd
from .qc import detect_qc, reconstruct_riemann

SUITES = ("jets", "parser", "curvature-oracle", "qc-roundtrip", "theorem-fixtures", "frg-identities")
SEED = 20240611


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    measured: float
    bound: float

    @property
    def passed(self):
        return bool(self.measured <= self.bound)


def format_check(c):
    return f"{'PASS' if c.passed else 'FAIL'} {c.suite}.{c.name} {c.measured:.3e} {c.bound:.1e}"


def _flag(ok):
    """Boolean checks report 0 when satisfied and 1 otherwise, against bound 0."""
    return 0.0 if ok else 1.0


def rel_err(a, b, floor=1e-30):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(norm(a), norm(b))
    return 0.0 if scale == 0.0 else norm(a - b) / max(floor, scale)


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

def _suite_jets():
    s = "jets"
    t = jet.variable(0, 2.0)
    cube = jet.mul(jet.mul(t, t), t)
    expect = np.zeros(jet.NCOEF)
    for k, c in enumerate((8.0, 12.0, 6.0, 1.0)):
        expect[jet.INDEX[(k, 0, 0, 0)]] = c
    yield Check(s, "cube_coefficients", norm(cube - expect), 0.0)

    h = jet.variable(1, 0.0)
    inv = jet.reciprocal(jet.constant(1.0) + h)
    series = [inv[jet.INDEX[(0, k, 0, 0)]] for k in range(4)]
    yield Check(s, "geometric_series", norm(np.subtract(series, [1, -1, 1, -1])), 1e-15)

    x = jet.variable(2, 0.7) + 0.3 * jet.variable(0, 0.0)
    one = jet.mul(jet.sin(x), jet.sin(x)) + jet.mul(jet.cos(x), jet.cos(x))
    yield Check(s, "pythagoras", norm(one - jet.constant(1.0)), 1e-14)
    yield Check(s, "exp_log_inverse", norm(jet.exp(jet.log(jet.exp(x))) - jet.exp(x)), 1e-13)

    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(20):
        a, b, c = (rng.normal(size=jet.NCOEF) for _ in range(3))
        lhs = jet.mul(jet.mul(a, b), c)
        rhs = jet.mul(a, jet.mul(b, c))
        worst = max(worst, norm(lhs - rhs) / max(1.0, norm(lhs)))
    yield Check(s, "product_associative", worst, 1e-13)

    worst = 0.0
    for _ in range(10):
        m = rng.normal(size=(jet.NCOEF, 4, 4)) * 0.3
        m[0] += np.diag([-2.0, 1.5, 2.0, 2.5])
        prod = jet.contract("ij,jk->ik", m, jet.matinv(m))
        worst = max(worst, norm(prod - jet.constant(1.0)[:, None, None] * np.eye(4)))
    yield Check(s, "matrix_inverse", worst, 1e-12)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_COORDS = ("t", "x", "y", "z")
_ATOMS = ("t", "x", "y", "z", "c", "2", "0.5", "3")


def random_expression(rnd, depth=3):
    """Source text of a random well-formed expression over ``t x y z`` and parameter ``c``."""
    if depth == 0 or rnd.random() < 0.25:
        return rnd.choice(_ATOMS)
    kind = rnd.randrange(4)
    if kind == 0:
        op = rnd.choice("+-*")
        return f"({random_expression(rnd, depth - 1)} {op} {random_expression(rnd, depth - 1)})"
    if kind == 1:
        return f"-{random_expression(rnd, depth - 1)}"
    if kind == 2:
        fn = rnd.choice(("exp", "sin", "cos", "sinh", "cosh"))
        return f"{fn}({random_expression(rnd, depth - 1)} / 4)"
    base = random_expression(rnd, depth - 1)
    return f"({base})^{rnd.randrange(0, 4)}"


def _suite_parser():
    s = "parser"
    x3 = {"t": 3.0}
    neg = expr.evaluate_scalar(expr.parse_expression("-t^2", _COORDS), x3, {})
    yield Check(s, "unary_below_power", abs(neg + 9.0), 0.0)
    right = expr.evaluate_scalar(expr.parse_expression("2^3^2", ()), {}, {})
    yield Check(s, "power_right_assoc", abs(right - 512.0), 0.0)

    rejected = 0
    bad = ("1 +", "(t", "foo(t)", "t^0.5", "t $ 2", "sin()")
    for src in bad:
        try:
            expr.parse_expression(src, _COORDS)
        except ExprError:
            rejected += 1
    yield Check(s, "rejects_malformed", float(len(bad) - rejected), 0.0)

    rnd = random.Random(SEED)
    mismatched, worst = 0, 0.0
    point = {"t": 0.4, "x": -0.3, "y": 0.8, "z": 0.1}
    params = {"c": 1.25}
    env = {n: jet.Jet3.variable(i, point[n]) for i, n in enumerate(_COORDS)}
    for _ in range(100):
        node = expr.parse_expression(random_expression(rnd), _COORDS)
        again = expr.parse_expression(expr.to_source(node), _COORDS)
        mismatched += not expr.same_tree(node, again)
        scalar = expr.evaluate_scalar(node, point, params)
        value = expr.evaluate(node, env, params).value
        worst = max(worst, abs(scalar - value) / max(1.0, abs(scalar)))
    yield Check(s, "print_parse_roundtrip", float(mismatched), 0.0)
    yield Check(s, "scalar_vs_jet_value", worst, 1e-12)


# ---------------------------------------------------------------------------
# curvature oracle
# ---------------------------------------------------------------------------

def oracle_errors(spec, x):
    """Relative Riemann and Ricci disagreement between jets and finite differences."""
    b = curvature_at(spec, x)
    _, riemann, ricci, _, _ = curvature_fd(spec, x)
    scale = max(norm(b.riemann), norm(riemann))
    riem_err = 0.0 if scale == 0.0 else norm(b.riemann - riemann) / max(1e-30, scale)
    rscale = max(norm(b.ricci), norm(ricci), scale)
    ric_err = 0.0 if rscale == 0.0 else norm(b.ricci - ricci) / max(1e-30, rscale)
    return riem_err, ric_err, b


def _suite_curvature(points=20):
    s = "curvature-oracle"
    rng = np.random.default_rng(SEED)
    for name, (params, sample) in CATALOG.items():
        spec = builtin(name, params)
        worst_r = worst_c = worst_b = 0.0
        for _ in range(points):
            r, c, b = oracle_errors(spec, sample(rng))
            worst_r, worst_c = max(worst_r, r), max(worst_c, c)
            worst_b = max(worst_b, bianchi_residual(b))
        yield Check(s, f"{name}.riemann", worst_r, 1e-5)
        yield Check(s, f"{name}.ricci", worst_c, 1e-5)
        yield Check(s, f"{name}.bianchi", worst_b, 1e-10)


# ---------------------------------------------------------------------------
# QC round trip
# ---------------------------------------------------------------------------

def random_lorentzian(rng):
    """Random (-,+,+,+) metric ``L^T eta L`` and its frame ``L``, with ``L`` near the identity."""
    L = np.eye(4) + 0.3 * rng.normal(size=(4, 4))
    return L.T @ np.diag([-1.0, 1.0, 1.0, 1.0]) @ L, L


def random_unit_timelike(rng, L):
    """Boosted unit vector in the orthonormal frame, mapped back through ``L``."""
    v = 0.8 * rng.normal(size=3)
    u = np.array([math.sqrt(1.0 + v @ v), *v])
    A = np.linalg.solve(L, u)
    return A if A[0] > 0 else -A


def synthetic_bundle(gamma, mu, A, g):
    """Curvature bundle stand-in built from an exact QC Riemann tensor."""
    ginv = np.linalg.inv(g)
    riemann = reconstruct_riemann(gamma, mu, g @ A, g)
    ricci = np.einsum("ij,hijk->hk", ginv, riemann)
    scalar = float(np.sum(ginv * ricci))
    return SimpleNamespace(g=g, ginv=ginv, riemann=riemann, ricci=ricci, weyl=weyl_tensor(riemann, ricci, scalar, g))


def _suite_qc():
    s = "qc-roundtrip"
    rng = np.random.default_rng(SEED)
    worst_s = worst_a = worst_r = 0.0
    for _ in range(50):
        g, L = random_lorentzian(rng)
        A = random_unit_timelike(rng, L)
        gamma, mu = rng.uniform(-3, 3), rng.choice([-1, 1]) * rng.uniform(0.2, 3)
        rep = detect_qc(synthetic_bundle(gamma, mu, A, g))
        scale = max(1.0, abs(gamma), abs(mu))
        worst_s = max(worst_s, (abs(rep.gamma - gamma) + abs(rep.mu - mu)) / scale)
        worst_a = max(worst_a, norm(rep.generator - A) / max(1.0, norm(A)))
        worst_r = max(worst_r, rep.riemann_residual_rel)
    yield Check(s, "scalars", worst_s, 1e-8)
    yield Check(s, "generator", worst_a, 1e-8)
    yield Check(s, "riemann_residual", worst_r, 1e-8)

    b = curvature_at(builtin("flrw-flat", {"a": "t^2"}), (1.0, 0.0, 0.0, 0.0))
    rep = detect_qc(b)
    yield Check(s, "flrw_t2.gamma", abs(rep.gamma - 4.0), 1e-8)
    yield Check(s, "flrw_t2.mu", abs(rep.mu - 2.0), 1e-8)
    yield Check(s, "flrw_t2.generator", float(np.max(np.abs(rep.generator - [1, 0, 0, 0]))), 1e-8)
    yield Check(s, "flrw_t2.residual", rep.riemann_residual_rel, 1e-8)

    rep = detect_qc(curvature_at(builtin("de-sitter", {"k": 1.0}), (0.3, 0.1, -0.2, 0.5)))
    yield Check(s, "de_sitter.mu", abs(rep.mu), 1e-10)
    yield Check(s, "de_sitter.gamma", abs(rep.gamma - 1.0), 1e-10)
    rep = detect_qc(curvature_at(builtin("schwarzschild", {"M": 1.0}), (0.0, 3.0, 1.5707963, 0.0)))
    yield Check(s, "schwarzschild.rejected", _flag(not rep.is_qc and rep.weyl_norm_rel > 1e-2), 0.0)


# ---------------------------------------------------------------------------
# theorem fixtures
# ---------------------------------------------------------------------------

def fixture_points(points=5):
    """``(name, spec, x)`` for a few random points of every catalog metric."""
    rng = np.random.default_rng(SEED + 1)
    out = []
    for name, (params, sample) in CATALOG.items():
        spec = builtin(name, params)
        out.extend((name, spec, sample(rng)) for _ in range(points))
    return out


def fluid_crosscheck(spec, x, kappa=1.0):
    """``(err_sigma_p, err_sum)`` between the QC fluid and Einstein-tensor projections.

    Returns None when the point is not QC.
    """
    b = curvature_at(spec, x)
    rep = detect_qc(b)
    if not rep.is_qc:
        return None
    A = rep.generator if rep.generator is not None else generator_jet(spec, b.point)[0]
    fluid = fluid_from_qc(rep.gamma, rep.mu, kappa)
    sigma, p = fluid_projections(stress_energy_from_einstein(b, kappa), b.g, A)
    scale = max(1.0, abs(fluid.p), abs(fluid.sigma))
    err = max(abs(sigma - fluid.sigma), abs(p - fluid.p)) / scale
    target = 2.0 * rep.mu / kappa ** 2
    total = fluid.p + fluid.sigma
    err_sum = 0.0 if total == target else abs(total - target) / max(abs(target), abs(fluid.p), abs(fluid.sigma))
    return err, err_sum


def _suite_theorems():
    s = "theorem-fixtures"
    tol = 1e-8
    worst_fluid = worst_sum = 0.0
    semi_violations = consistency_violations = static_violations = 0
    for name, spec, x in fixture_points():
        for kappa in (1.0, 0.7):
            res = fluid_crosscheck(spec, x, kappa)
            if res is not None:
                worst_fluid, worst_sum = max(worst_fluid, res[0]), max(worst_sum, res[1])
        b = curvature_at(spec, x)
        rep = detect_qc(b)
        diag = diagnose(b, rep, spec, tol)
        if diag.ricci_symmetric_dev <= 1e-10 and diag.semisymmetry_dev > 1e-10:
            semi_violations += 1
        if rep.is_qc and diag.ricci_symmetric_dev <= tol:
            scale = tol * max(1.0, abs(rep.gamma))
            if not (abs(rep.mu) <= scale or abs(rep.mu - rep.gamma) <= scale):
                consistency_violations += 1
            if abs(rep.mu) > scale and abs(rep.mu - rep.gamma) <= scale:
                if not (diag.killing_dev <= tol and diag.vorticity_dev <= tol):
                    static_violations += 1
    yield Check(s, "fluid_vs_einstein", worst_fluid, 1e-8)
    yield Check(s, "p_plus_sigma", worst_sum, 1e-12)
    yield Check(s, "symmetric_implies_semisymmetric", float(semi_violations), 0.0)
    yield Check(s, "ricci_symmetric_dichotomy", float(consistency_violations), 0.0)
    yield Check(s, "ricci_symmetric_static", float(static_violations), 0.0)

    spec = builtin("einstein-static", {"a0": 1.0})
    b = curvature_at(spec, (0.0, 1.0, 1.0, 0.5))
    rep = detect_qc(b)
    gen = generator_checks(b, generator_field(b, rep, spec))
    diag = diagnose(b, rep, spec)
    yield Check(s, "einstein_static.gamma", abs(rep.gamma - 1.0), 1e-10)
    yield Check(s, "einstein_static.mu", abs(rep.mu - 1.0), 1e-10)
    yield Check(s, "einstein_static.ricci_symmetric", diag.ricci_symmetric_dev, 1e-10)
    yield Check(s, "einstein_static.killing", gen.killing_dev, 1e-10)
    yield Check(s, "einstein_static.vorticity", gen.vorticity_dev, 1e-10)
    yield Check(s, "einstein_static.div", abs(gen.div_A), 1e-10)
    yield Check(s, "einstein_static.type_O", _flag(diag.flags["conformally_flat"]), 0.0)

    for name, x in (("de-sitter", (0.2, 0.0, 0.3, -0.1)), ("schwarzschild", (0.0, 4.0, 1.2, 0.3))):
        b = curvature_at(builtin(name, CATALOG[name][0]), x)
        yield Check(s, f"{name}.semisymmetry", diagnose(b).semisymmetry_dev, 1e-10)


# ---------------------------------------------------------------------------
# F(R) identities
# ---------------------------------------------------------------------------

def _rel(a, b):
    return 0.0 if a == b else abs(a - b) / max(1e-300, abs(a), abs(b))


def pair_rel(a, b):
    """Normwise relative distance of two ``(sigma, p)`` pairs.

    A componentwise ratio is ill-conditioned when one component nearly
    cancels (``p = 2 mu - 3 gamma`` close to 0), so the pair is compared as a vector.
    """
    return rel_err(a, b, floor=1e-300)


def route_errors(gamma, mu, model, kappa=1.0):
    """``(pairwise, componentwise)`` disagreement of the two effective-quantity routes."""
    sigma_d, p_d = effective_from_qc(gamma, mu, model, kappa)
    p, sigma = fr_pressure_density(gamma, mu, model, kappa)
    p_c, sigma_c = effective_quantities(p, sigma, qc_scalar_curvature(gamma, mu), model, kappa)
    return pair_rel((sigma_d, p_d), (sigma_c, p_c)), max(_rel(sigma_d, sigma_c), _rel(p_d, p_c))


def route_error(gamma, mu, model, kappa=1.0):
    return route_errors(gamma, mu, model, kappa)[0]


def gr_reduction_errors(gamma, mu):
    """``(pairwise, componentwise)`` gap between the F = R pipeline and the plain fluid."""
    gr = pure_gr()
    fl = fluid_from_qc(gamma, mu)
    sigma_e, p_e = effective_from_qc(gamma, mu, gr)
    p, sigma = fr_pressure_density(gamma, mu, gr)
    ref = (fl.sigma, fl.p)
    pair = max(pair_rel((sigma_e, p_e), ref), pair_rel((sigma, p), ref))
    comp = max(_rel(sigma_e, fl.sigma), _rel(p_e, fl.p), _rel(sigma, fl.sigma), _rel(p, fl.p))
    return pair, comp


def random_qc_scalars(rng, n=1000, r_max=30.0):
    """``(gamma, mu)`` pairs with ``R = 6 (2 gamma - mu)`` uniform in ``(0, r_max)``."""
    R = rng.uniform(0.0, r_max, size=n)
    R[R == 0.0] = r_max / 2
    mu = rng.uniform(-5.0, 5.0, size=n)
    gamma = (R / 6.0 + mu) / 2.0
    return list(zip(gamma.tolist(), mu.tolist()))


def figure_checks(scan):
    """Cell-by-cell counts of the qualitative figure claims that fail.

    The bare SEC predicate ``mu >= gamma`` presumes ``F_R > 0`` (``R > 1`` for
    Model A); the sign-aware form ``(mu - gamma) F_R >= 0`` is checked on every cell.
    """
    bad_sigma = bad_nw = bad_sec = bad_sec_signed = bad_dec = 0
    for r in scan.records:
        if 3 * r.gamma > r.mu and r.R > 1:
            bad_sigma += not r.sigma_eff > 0
            bad_nw += not (r.nec and r.wec)
        if r.F_R > 0:
            bad_sec += r.sec != (r.mu >= r.gamma)
        bad_sec_signed += r.sec != ((r.mu - r.gamma) * r.F_R >= 0)
        bad_dec += r.dec != (15 * r.gamma >= 7 * r.mu and r.sigma_eff >= 0)
    return bad_sigma, bad_nw, bad_sec, bad_sec_signed, bad_dec


def _suite_frg():
    s = "frg-identities"
    exact = {R: math.exp(R) * math.log(R) for R in (1, 2, 3, 4, 5)}
    model = model_a(64)
    worst = max(abs(model.F_R(R) - v) for R, v in exact.items())
    yield Check(s, "model_a.derivative_identity", worst, 1e-9)
    errs = [abs(model_a(L).F_R(5.0) - exact[5]) for L in (8, 16, 32, 64)]
    increases = sum(b > a for a, b in zip(errs, errs[1:]))
    yield Check(s, "model_a.monotone_in_L", float(increases), 0.0)

    rng = np.random.default_rng(SEED)
    pairs = random_qc_scalars(rng)
    yield Check(s, "route_equivalence", max(route_error(g, m, model) for g, m in pairs), 1e-12)

    yield Check(s, "pure_gr_reduction", max(gr_reduction_errors(g, m)[0] for g, m in pairs), 1e-12)

    scan = scan_grid((1.0, 2.0), (0.5, 2.0), 50, model)
    bad_sigma, bad_nw, bad_sec, bad_sec_signed, bad_dec = figure_checks(scan)
    yield Check(s, "figure.sigma_positive", float(bad_sigma), 0.0)
    yield Check(s, "figure.nec_wec", float(bad_nw), 0.0)
    yield Check(s, "figure.sec_predicate", float(bad_sec), 0.0)
    yield Check(s, "figure.sec_signed_predicate", float(bad_sec_signed), 0.0)
    yield Check(s, "figure.dec_predicate", float(bad_dec), 0.0)


_RUNNERS = {
    "jets": _suite_jets,
    "parser": _suite_parser,
    "curvature-oracle": _suite_curvature,
    "qc-roundtrip": _suite_qc,
    "theorem-fixtures": _suite_theorems,
    "frg-identities": _suite_frg,
}


def select_suites(name=None):
    """Suites matching ``name`` exactly or as a prefix (``frg`` selects ``frg-identities``)."""
    if name is None or name == "all":
        return list(SUITES)
    if name in _RUNNERS:
        return [name]
    hits = [s for s in SUITES if s.startswith(name)]
    if not hits:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return hits


def run_suites(names=None):
    """Run the selected suites and return every ``Check``; any harness exception propagates."""
    checks = []
    for suite in select_suites(names):
        try:
            checks.extend(_RUNNERS[suite]())
        except QCSTError as exc:
            # a library error inside a suite is a failed check, not a crash
            checks.append(Check(suite, f"error[{type(exc).__name__}]", 1.0, 0.0))
    return checks

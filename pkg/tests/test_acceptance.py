"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import io
import math

import numpy as np
import pytest

from qcst.cli import main
from qcst.curvature import curvature_at
from qcst.diagnostics import diagnose, generator_checks, generator_field
from qcst.frg import model_a, scan_grid
from qcst.metric import CATALOG, builtin
from qcst.qc import detect_qc
from qcst.verify import (
    figure_checks, fixture_points, fluid_crosscheck, gr_reduction_errors, oracle_errors,
    random_qc_scalars, route_errors,
)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail
    return emit


def test_criterion_01_curvature_oracle(report):
    rng = np.random.default_rng(101)
    worst_r = worst_c = 0.0
    for name, (params, sample) in CATALOG.items():
        spec = builtin(name, params)
        for _ in range(20):
            r, c, _ = oracle_errors(spec, sample(rng))
            worst_r, worst_c = max(worst_r, r), max(worst_c, c)
    report(1, worst_r <= 1e-5 and worst_c <= 1e-5,
           f"worst rel riemann {worst_r:.2e}, ricci {worst_c:.2e} (bound 1e-5)")


def test_criterion_02_flrw_detection(report):
    rep = detect_qc(curvature_at(builtin("flrw-flat", {"a": "t^2"}), (1.0, 0.0, 0.0, 0.0)))
    errs = (abs(rep.gamma - 4.0), abs(rep.mu - 2.0), float(np.max(np.abs(rep.generator - [1, 0, 0, 0]))))
    ok = max(errs) <= 1e-8 and rep.riemann_residual_rel <= 1e-8
    report(2, ok, f"|dgamma| {errs[0]:.1e}, |dmu| {errs[1]:.1e}, |dA| {errs[2]:.1e}, "
                  f"residual {rep.riemann_residual_rel:.1e}")


def test_criterion_03_constant_curvature_branch(report):
    ds = detect_qc(curvature_at(builtin("de-sitter", {"k": 1.0}), (0.3, 0.1, -0.2, 0.5)))
    sch = detect_qc(curvature_at(builtin("schwarzschild", {"M": 1.0}), (0.0, 3.0, 1.2, 0.4)))
    ok = abs(ds.mu) <= 1e-10 and abs(ds.gamma - 1.0) <= 1e-10 and not sch.is_qc and sch.weyl_norm_rel > 1e-2
    report(3, ok, f"de Sitter mu {ds.mu:.1e} gamma-1 {ds.gamma - 1:.1e}; "
                  f"Schwarzschild is_qc {sch.is_qc} weyl_rel {sch.weyl_norm_rel:.2f}")


def test_criterion_04_fluid_vs_einstein(report):
    worst = worst_sum = 0.0
    accepted = 0
    for _, spec, x in fixture_points():
        for kappa in (1.0, 0.7, 2.0):
            res = fluid_crosscheck(spec, x, kappa)
            if res is None:
                continue
            accepted += 1
            worst, worst_sum = max(worst, res[0]), max(worst_sum, res[1])
    ok = accepted > 0 and worst <= 1e-8 and worst_sum <= 1e-12
    report(4, ok, f"{accepted} accepted fixtures, fluid err {worst:.1e} (1e-8), p+sigma rel {worst_sum:.1e} (1e-12)")


def test_criterion_05_einstein_static(report):
    spec = builtin("einstein-static", {"a0": 1.0})
    b = curvature_at(spec, (0.0, 1.0, 1.0, 0.5))
    rep = detect_qc(b)
    d = diagnose(b, rep, spec)
    gen = generator_checks(b, generator_field(b, rep, spec))
    ok = (
        abs(rep.gamma - 1) <= 1e-10 and abs(rep.mu - 1) <= 1e-10
        and d.ricci_symmetric_dev <= 1e-10 and gen.killing_dev <= 1e-10
        and gen.vorticity_dev <= 1e-10 and d.flags["conformally_flat"]
    )
    report(5, ok, f"gamma {rep.gamma:.12g} mu {rep.mu:.12g} ricci_sym {d.ricci_symmetric_dev:.1e} "
                  f"killing {gen.killing_dev:.1e} vort {gen.vorticity_dev:.1e} type O {d.flags['conformally_flat']}")


def test_criterion_06_semisymmetry(report):
    devs = {}
    for name, x in (("de-sitter", (0.2, 0.0, 0.3, -0.1)), ("schwarzschild", (0.0, 4.0, 1.2, 0.3))):
        devs[name] = diagnose(curvature_at(builtin(name, CATALOG[name][0]), x)).semisymmetry_dev
    violations = symmetric = 0
    for _, spec, x in fixture_points():
        d = diagnose(curvature_at(spec, x))
        if d.ricci_symmetric_dev <= 1e-10:
            symmetric += 1
            violations += d.semisymmetry_dev > 1e-10
    ok = max(devs.values()) <= 1e-10 and violations == 0 and symmetric > 0
    report(6, ok, f"semisymmetry de Sitter {devs['de-sitter']:.1e}, Schwarzschild {devs['schwarzschild']:.1e}; "
                  f"{violations} of {symmetric} Ricci-symmetric fixtures not semi-symmetric")


def test_criterion_07_model_a_identity(report):
    m = model_a(64)
    worst = max(abs(m.F_R(R) - math.exp(R) * math.log(R)) for R in (1, 2, 3, 4, 5))
    exact = math.exp(5) * math.log(5)
    errs = [abs(model_a(L).F_R(5.0) - exact) for L in (8, 16, 32, 64)]
    monotone = all(b <= a for a, b in zip(errs, errs[1:]))
    report(7, worst <= 1e-9 and monotone,
           f"max |F_R - e^R log R| {worst:.1e} (1e-9); errors at R=5 for L=8..64 "
           + " ".join(f"{e:.1e}" for e in errs))


def test_criterion_08_route_equivalence(report):
    rng = np.random.default_rng(808)
    pairs = random_qc_scalars(rng, n=1000, r_max=30.0)
    model = model_a(64)
    route = [route_errors(g, m, model) for g, m in pairs]
    gr = [gr_reduction_errors(g, m) for g, m in pairs]
    worst_route, worst_gr = max(r[0] for r in route), max(r[0] for r in gr)
    report(8, worst_route <= 1e-12 and worst_gr <= 1e-12,
           f"normwise (sigma, p) rel: route {worst_route:.1e}, pure GR {worst_gr:.1e} on 1000 pairs (1e-12); "
           f"componentwise worst {max(r[1] for r in route):.1e} / {max(r[1] for r in gr):.1e} (info)")


def test_criterion_09_figure_reproduction(report):
    scan = scan_grid((1.0, 2.0), (0.5, 2.0), 50, model_a(64), 1.0)
    bad_sigma, bad_nw, bad_sec, bad_sec_signed, bad_dec = figure_checks(scan)
    negative_fr = sum(r.F_R < 0 for r in scan.records)
    ok = bad_sigma == bad_nw == bad_sec == bad_sec_signed == bad_dec == 0
    report(9, ok,
           f"{len(scan.records)} cells: sigma_eff<=0 {bad_sigma}, NEC/WEC off {bad_nw}, "
           f"SEC != (mu>=gamma) {bad_sec} (F_R>0 cells), SEC != ((mu-gamma)F_R>=0) {bad_sec_signed}, "
           f"DEC mismatches {bad_dec}; {negative_fr} cells have F_R<0")


def test_criterion_10_determinism(report, tmp_path):
    paths = [tmp_path / "one.csv", tmp_path / "two.csv"]
    codes = [main(["ec-scan", "--out", str(p)], out=io.StringIO()) for p in paths]
    same = paths[0].read_bytes() == paths[1].read_bytes()
    out = io.StringIO()
    code = main(["verify"], out=out)
    lines = [l for l in out.getvalue().splitlines() if not l.startswith("#")]
    fails = [l for l in lines if not l.startswith("PASS")]
    ok = codes == [0, 0] and same and code == 0 and lines and not fails
    report(10, ok, f"ec-scan byte-identical {same}; verify {len(lines) - len(fails)}/{len(lines)} PASS")

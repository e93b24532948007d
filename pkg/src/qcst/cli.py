"""Command-line entry point: ``qcst analyze | ec-scan | catalog | verify``.

Exit codes: 0 success, 1 usage, 2 bad input or out-of-domain request,
3 internal failure (including any failed verification check).
"""

import argparse
import dataclasses
import math
import os
import sys

from .curvature import FAULTS as ACTIVE_FAULTS, curvature_at, norm
from .diagnostics import diagnose
from .exceptions import BadParameter, InputError, NonDiagonalizableRicci
from .fluid import check_kappa, fluid_from_qc
from .frg import MODELS, format_csv, get_model, scan_grid, write_csv
from .metric import BUILTIN_NAMES, CATALOG, builtin, load_metric
from .qc import DEFAULT_TOL, detect_qc
from .verify import SUITES, format_check, run_suites

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
FAULTS = ("riemann-sign",)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_tol():
    raw = os.environ.get("QCST_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"QCST_TOL must be a positive real, got {raw!r}") from None
    if not tol > 0:
        raise UsageError(f"QCST_TOL must be a positive real, got {raw!r}")
    return tol


def parse_assignments(text, what):
    """``"a=1,b=2"`` -> ``{"a": "1", "b": "2"}``, keeping order."""
    out = {}
    for item in text.split(","):
        name, sep, value = item.partition("=")
        name, value = name.strip(), value.strip()
        if not sep or not name or not value:
            raise UsageError(f"bad {what} {item!r}; expected name=value")
        if name in out:
            raise UsageError(f"{what} {name!r} given twice")
        out[name] = value
    return out


def parse_point(text):
    values = {}
    for name, value in parse_assignments(text, "coordinate").items():
        try:
            values[name] = float(value)
        except ValueError:
            raise UsageError(f"coordinate {name} must be a real number, got {value!r}") from None
    return values


def resolve_metric(source, params):
    """``builtin:name`` or a metric file path, with ``--param`` overrides applied."""
    if source.startswith("builtin:"):
        return builtin(source[len("builtin:"):], params)
    try:
        with open(source, encoding="utf-8") as fh:
            spec = load_metric(fh.read())
    except OSError as exc:
        raise BadParameter(f"cannot read metric file {source!r}: {exc.strerror}") from None
    if not params:
        return spec
    unknown = sorted(set(params) - set(spec.parameters))
    if unknown:
        raise BadParameter(f"metric file declares no parameter(s) {unknown}")
    values = dict(spec.parameters)
    for name, raw in params.items():
        try:
            values[name] = float(raw)
        except ValueError:
            raise BadParameter(f"parameter {name} must be a real number, got {raw!r}") from None
    return dataclasses.replace(spec, parameters=values)


def convention_header(kappa):
    return [
        "# signature (-,+,+,+); R_ij = R^p_ipj (positive on spheres)",
        "# constant curvature k: R_hijk = k (g_hk g_ij - g_hj g_ik); QC generator A unit timelike, A^0 > 0",
        f"# kappa = {kappa!r}",
    ]


def _fmt(x):
    if x is None:
        return "none"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else "%.12g" % (x + 0.0)
    return str(x)


def analyze_point(spec, point, kappa, tol):
    """Every report for one point, as an ordered list of ``(key, value)`` pairs."""
    b = curvature_at(spec, point)
    rows = [
        ("point", " ".join(f"{c}={_fmt(v)}" for c, v in zip(spec.coordinates, b.point))),
        ("R", b.scalar),
        ("ricci_norm", norm(b.ricci)),
        ("weyl_norm", norm(b.weyl)),
    ]
    try:
        rep = detect_qc(b, tol)
    except NonDiagonalizableRicci as exc:
        rep = None
        rows += [("is_qc", False), ("qc_note", str(exc))]
    if rep is not None:
        rows += [
            ("is_qc", rep.is_qc),
            ("constant_curvature", rep.constant_curvature),
            ("gamma", rep.gamma),
            ("mu", rep.mu),
            ("generator", None if rep.generator is None else " ".join(_fmt(float(a)) for a in rep.generator)),
            ("riemann_residual_rel", rep.riemann_residual_rel),
            ("weyl_norm_rel", rep.weyl_norm_rel),
        ]
        if rep.is_qc:
            fl = fluid_from_qc(rep.gamma, rep.mu, kappa)
            rows += [("p", fl.p), ("sigma", fl.sigma), ("w", fl.w), ("era", str(fl.era))]
    d = diagnose(b, rep, spec, tol)
    rows += [
        ("codazzi_dev", d.codazzi_dev),
        ("ricci_symmetric_dev", d.ricci_symmetric_dev),
        ("semisymmetry_dev", d.semisymmetry_dev),
        ("conformally_flat", d.flags["conformally_flat"]),
        ("div_A", d.div_A),
        ("killing_dev", d.killing_dev),
        ("vorticity_dev", d.vorticity_dev),
        ("gamma_along_A", d.gamma_along_A),
    ]
    return rows


ANALYZE_COLUMNS = (
    "point", "R", "ricci_norm", "weyl_norm", "is_qc", "constant_curvature", "gamma", "mu",
    "generator", "riemann_residual_rel", "weyl_norm_rel", "p", "sigma", "w", "era",
    "codazzi_dev", "ricci_symmetric_dev", "semisymmetry_dev", "conformally_flat",
    "div_A", "killing_dev", "vorticity_dev", "gamma_along_A",
)


def cmd_analyze(args, out):
    if not args.point:
        raise UsageError("analyze needs at least one --point")
    kappa = check_kappa(args.kappa)
    spec = resolve_metric(args.metric, _params(args))
    points = [parse_point(p) for p in args.point]
    results = [dict(analyze_point(spec, pt, kappa, args.tol)) for pt in points]
    if args.format == "csv":
        lines = [",".join(ANALYZE_COLUMNS)]
        for r in results:
            lines.append(",".join(_fmt(r.get(c)) for c in ANALYZE_COLUMNS))
        text = "\n".join(lines) + "\n"
    else:
        lines = convention_header(kappa) + [f"metric: {spec.label or args.metric}", f"tol: {_fmt(args.tol)}"]
        for r in results:
            lines.append("")
            lines += [f"{k}: {_fmt(v)}" for k, v in r.items()]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out, out)
    return EXIT_OK


def cmd_ec_scan(args, out):
    kappa = check_kappa(args.kappa)
    model = get_model(args.model, args.terms)
    scan = scan_grid(
        (args.mu_min, args.mu_max), (args.gamma_min, args.gamma_max),
        (args.mu_steps, args.gamma_steps), model, kappa,
    )
    summary = convention_header(kappa) + [f"model: {model.label}"] + scan.summary_lines()
    if args.out:
        write_csv(scan.records, args.out)
        out.write("\n".join(summary) + "\n")
    else:
        out.write(format_csv(scan.records))
        sys.stderr.write("\n".join(summary) + "\n")
    return EXIT_OK


def cmd_catalog(args, out):
    if args.format == "csv":
        lines = ["name,coordinates,default_params"]
        for name in BUILTIN_NAMES:
            params = ";".join(f"{k}={v}" for k, v in CATALOG[name][0].items())
            lines.append(f"{name},{' '.join(builtin(name).coordinates)},{params}")
    else:
        lines = []
        for name in BUILTIN_NAMES:
            params = " ".join(f"{k}={v}" for k, v in CATALOG[name][0].items()) or "-"
            lines.append(f"{name:16s} coordinates: {' '.join(builtin(name).coordinates):22s} params: {params}")
    _emit("\n".join(lines) + "\n", args.out, out)
    return EXIT_OK


def cmd_verify(args, out):
    if args.inject_fault:
        ACTIVE_FAULTS.add(args.inject_fault)
    try:
        checks = run_suites(args.suite)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    finally:
        ACTIVE_FAULTS.discard(args.inject_fault)
    for c in checks:
        out.write(format_check(c) + "\n")
    failed = sum(not c.passed for c in checks)
    out.write(f"# {len(checks) - failed}/{len(checks)} checks passed\n")
    return EXIT_OK if failed == 0 else EXIT_INTERNAL


def _params(args):
    params = {}
    for item in args.param or ():
        for name, value in parse_assignments(item, "parameter").items():
            params[name] = value
    return params


def _emit(text, path, out):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)


def build_parser():
    parser = _Parser(prog="qcst", description="Curvature, QC detection and F(R) energy-condition tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--kappa", type=float, default=1.0, help="coupling kappa (default 1)")
        p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("analyze", help="curvature, QC, fluid and diagnostics at points")
    p.add_argument("--metric", required=True, help="metric file path or builtin:NAME")
    p.add_argument("--param", action="append", metavar="K=V", help="metric parameter (repeatable)")
    p.add_argument("--point", action="append", metavar="NAME=VALUE,...", help="evaluation point (repeatable)")
    p.add_argument("--tol", type=float, default=None, help="detection tolerance (env QCST_TOL, default 1e-8)")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    common(p)
    p.set_defaults(run=cmd_analyze)

    p = sub.add_parser("ec-scan", help="effective energy conditions on a (mu, gamma) grid")
    p.add_argument("--model", choices=sorted(MODELS), default="A")
    p.add_argument("--terms", type=int, default=64, help="Model A series truncation L (default 64)")
    p.add_argument("--mu-min", type=float, default=1.0)
    p.add_argument("--mu-max", type=float, default=2.0)
    p.add_argument("--mu-steps", type=int, default=50)
    p.add_argument("--gamma-min", type=float, default=0.5)
    p.add_argument("--gamma-max", type=float, default=2.0)
    p.add_argument("--gamma-steps", type=int, default=50)
    common(p)
    p.set_defaults(run=cmd_ec_scan)

    p = sub.add_parser("catalog", help="list builtin metrics")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(run=cmd_catalog)

    p = sub.add_parser("verify", help="run the self-verification suites")
    p.add_argument("--suite", help=f"one of {', '.join(SUITES)} (prefixes allowed); default all")
    p.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    p.set_defaults(run=cmd_verify)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "tol", "absent") is None:
            args.tol = default_tol()
        if getattr(args, "tol", 1.0) <= 0:
            raise UsageError("--tol must be positive")
        return args.run(args, out)
    except UsageError as exc:
        sys.stderr.write(f"qcst: error: {exc}\n")
        return EXIT_USAGE
    except (InputError, NonDiagonalizableRicci) as exc:
        sys.stderr.write(f"qcst: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - any other failure is an internal fault
        sys.stderr.write(f"qcst: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()

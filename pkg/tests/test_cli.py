import io
import subprocess
import sys

import pytest

from qcst.cli import main

FLRW_FILE = """\
coordinates: t x y z
param c = 1
g_tt = -1
g_xx = (c*t^2)^2
g_yy = (c*t^2)^2
g_zz = (c*t^2)^2
generator: 1 0 0 0
"""


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def fields(text):
    out = {}
    for line in text.splitlines():
        if line and not line.startswith("#") and ": " in line:
            key, _, value = line.partition(": ")
            out.setdefault(key, value)
    return out


def test_analyze_flrw_builtin():
    code, text = run("analyze", "--metric", "builtin:flrw-flat", "--param", "a=t^2", "--point", "t=1,x=0,y=0,z=0")
    assert code == 0
    assert text.startswith("# signature")
    f = fields(text)
    assert float(f["gamma"]) == pytest.approx(4.0)
    assert float(f["mu"]) == pytest.approx(2.0)
    assert float(f["p"]) == pytest.approx(-8.0) and float(f["sigma"]) == pytest.approx(12.0)
    assert f["era"] == "Quintessence" and f["is_qc"] == "true"
    assert f["generator"] == "1 0 0 0"


def test_analyze_file_with_param_override(tmp_path):
    path = tmp_path / "flrw.metric"
    path.write_text(FLRW_FILE)
    code, text = run("analyze", "--metric", str(path), "--param", "c=2", "--point", "t=1,x=0,y=0,z=0")
    assert code == 0
    assert float(fields(text)["R"]) == pytest.approx(36.0)  # a = 2 t^2 keeps a''/a and a'/a
    code, _ = run("analyze", "--metric", str(path), "--param", "k=2", "--point", "t=1,x=0,y=0,z=0")
    assert code == 2


def test_analyze_csv_and_kappa():
    code, text = run(
        "analyze", "--metric", "builtin:flrw-flat", "--param", "a=t^2", "--kappa", "2",
        "--point", "t=1,x=0,y=0,z=0", "--point", "t=2,x=0,y=0,z=0", "--format", "csv",
    )
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == 3
    row = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert float(row["sigma"]) == pytest.approx(3.0)


def test_analyze_schwarzschild_not_qc():
    code, text = run("analyze", "--metric", "builtin:schwarzschild", "--point", "t=0,r=3,theta=1.2,phi=0")
    assert code == 0 and fields(text)["is_qc"] == "false"


def test_analyze_tol_from_env(monkeypatch):
    monkeypatch.setenv("QCST_TOL", "1e-3")
    code, text = run("analyze", "--metric", "builtin:minkowski", "--point", "t=0,x=0,y=0,z=0")
    assert code == 0 and fields(text)["tol"] == "0.001"
    assert fields(text)["era"] == "Vacuum"
    monkeypatch.setenv("QCST_TOL", "zero")
    assert run("analyze", "--metric", "builtin:minkowski", "--point", "t=0,x=0,y=0,z=0")[0] == 1


@pytest.mark.parametrize(
    "argv,code",
    [
        (["frobnicate"], 1),
        (["analyze", "--metric", "builtin:minkowski"], 1),
        (["analyze", "--metric", "builtin:minkowski", "--point", "t=0,x=0,y=0"], 2),
        (["analyze", "--metric", "builtin:minkowski", "--point", "t=zero,x=0,y=0,z=0"], 1),
        (["analyze", "--metric", "builtin:kerr", "--point", "t=0,x=0,y=0,z=0"], 2),
        (["analyze", "--metric", "/nonexistent/file", "--point", "t=0,x=0,y=0,z=0"], 2),
        (["analyze", "--metric", "builtin:schwarzschild", "--point", "t=0,r=2,theta=1,phi=0"], 2),
        (["ec-scan", "--mu-steps", "1"], 2),
        (["ec-scan", "--kappa", "0"], 2),
        (["ec-scan", "--terms", "1"], 2),
        (["ec-scan", "--gamma-min", "-2", "--gamma-max", "-1", "--mu-steps", "3", "--gamma-steps", "3"], 2),
        (["verify", "--suite", "nope"], 1),
    ],
)
def test_exit_codes(argv, code):
    # argparse-level usage errors surface as SystemExit, the rest as return codes
    try:
        got = run(*argv)[0]
    except SystemExit as exc:
        got = exc.code
    assert got == code


def test_ec_scan_to_file_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    flags = ["ec-scan", "--mu-steps", "10", "--gamma-steps", "10"]
    code, summary = run(*flags, "--out", str(a))
    assert code == 0 and "NEC satisfied" in summary
    assert run(*flags, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0].startswith("mu,gamma,R")


def test_ec_scan_stdout_is_csv(capsys):
    code, text = run("ec-scan", "--model", "GR", "--mu-steps", "3", "--gamma-steps", "3")
    assert code == 0 and text.startswith("mu,gamma,")
    assert "model: GR" in capsys.readouterr().err


def test_catalog():
    code, text = run("catalog")
    assert code == 0 and "schwarzschild" in text and "de-sitter" in text
    code, text = run("catalog", "--format", "csv")
    assert text.splitlines()[0] == "name,coordinates,default_params"


def test_verify_prefix_and_fault():
    code, text = run("verify", "--suite", "frg")
    assert code == 0
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert lines and all(l.startswith("PASS frg-identities.") for l in lines)
    code, text = run("verify", "--suite", "curvature", "--inject-fault", "riemann-sign")
    assert code == 3
    assert any(l.startswith("FAIL curvature-oracle.") for l in text.splitlines())
    # the hook is cleared afterwards
    assert run("verify", "--suite", "curvature")[0] == 0


def test_console_script_module():
    proc = subprocess.run(
        [sys.executable, "-m", "qcst.cli", "catalog"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and "minkowski" in proc.stdout

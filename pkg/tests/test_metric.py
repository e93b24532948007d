import math

import numpy as np
import pytest

from qcst import jet
from qcst.expr import same_tree
from qcst.exceptions import (
    BadParameter, DuplicateKey, MissingComponent, ParseError, SignatureError, SingularMetric,
    UnknownBuiltin, UnknownCoordinate,
)
from qcst.metric import (
    BUILTIN_NAMES, CATALOG, builtin, eval_metric, generator_jet, load_metric, metric_values,
)

MINKOWSKI = """\
# flat space
coordinates: t x y z
g_tt = -1
g_xx = 1
g_yy = 1
g_zz = 1
"""

FLRW = """\
label: flat FLRW
coordinates: t x y z
g_tt = -1
g_xx = (t^2)^2
g_yy = (t^2)^2
g_zz = (t^2)^2
generator: 1, 0, 0, 0
"""


def test_minkowski_file():
    spec = load_metric(MINKOWSKI)
    assert spec.coordinates == ("t", "x", "y", "z")
    mj = eval_metric(spec, (0.0, 0.0, 0.0, 0.0))
    assert np.array_equal(mj.ginv[0], np.diag([-1.0, 1.0, 1.0, 1.0]))
    assert np.count_nonzero(mj.g[1:]) == 0 and np.count_nonzero(mj.ginv[1:]) == 0
    assert mj.det_value < 0


def test_flrw_file_matches_builtin():
    assert load_metric(FLRW).equivalent(builtin("flrw-flat", {"a": "t^2"}))
    assert not load_metric(FLRW).equivalent(builtin("flrw-flat", {"a": "t^3"}))


def test_text_roundtrip():
    for name in BUILTIN_NAMES:
        spec = builtin(name)
        assert load_metric(spec.to_text()).equivalent(spec), name


def test_missing_component():
    with pytest.raises(MissingComponent):
        load_metric(MINKOWSKI.replace("g_yy = 1\n", ""))


def test_duplicate_component():
    with pytest.raises(DuplicateKey):
        load_metric(MINKOWSKI + "g_xx = 2\n")
    with pytest.raises(DuplicateKey):
        load_metric(MINKOWSKI + "g_tx = 0\ng_x_t = 0\n")


def test_unknown_coordinate_and_key():
    with pytest.raises(UnknownCoordinate):
        load_metric(MINKOWSKI + "g_tw = 0\n")
    with pytest.raises(UnknownCoordinate):
        load_metric(MINKOWSKI.replace("g_zz = 1", "g_zz = 1 + w"))
    with pytest.raises(ParseError):
        load_metric(MINKOWSKI + "colour: blue\n")


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        load_metric("coordinates: t x y z\ng_tt = -1 +\ng_xx=1\ng_yy=1\ng_zz=1\n")
    assert exc.value.line == 2 and exc.value.col == 12


def test_params_and_underscore_form():
    text = """\
coordinates: t r theta phi
param M = 1.0
g_t_t = -(1 - 2*M/r)
g_r_r = 1/(1 - 2*M/r)
g_theta_theta = r^2
g_phi_phi = r^2*sin(theta)^2
"""
    spec = load_metric(text)
    assert spec.parameters == {"M": 1.0}
    ref = builtin("schwarzschild", {"M": 1.0})
    assert all(same_tree(spec.components[k], ref.components[k]) for k in ref.components)
    g = metric_values(spec, (0.0, 3.0, math.pi / 2, 0.0))
    assert g[0, 0] == pytest.approx(-1.0 / 3.0, rel=1e-15)


def test_euclidean_rejected():
    with pytest.raises(SignatureError):
        eval_metric(load_metric(MINKOWSKI.replace("g_tt = -1", "g_tt = 1")), (0, 0, 0, 0))


def test_degenerate_rejected():
    with pytest.raises(SingularMetric):
        eval_metric(load_metric(MINKOWSKI.replace("g_xx = 1", "g_xx = 0")), (0, 0, 0, 0))


def test_schwarzschild_horizon_singular():
    spec = builtin("schwarzschild", {"M": 1.0})
    with pytest.raises(SingularMetric):
        eval_metric(spec, (0.0, 2.0, 1.0, 0.0))


def test_builtin_values():
    g = metric_values(builtin("flrw-flat", {"a": "t^2"}), (1.5, 0, 0, 0))
    assert g[1, 1] == pytest.approx(1.5**4)
    g = metric_values(builtin("schwarzschild", {"M": 1}), (0, 3.0, math.pi / 2, 0))
    assert g[0, 0] == pytest.approx(-1.0 / 3.0)


def test_builtin_errors():
    with pytest.raises(UnknownBuiltin):
        builtin("kerr")
    with pytest.raises(BadParameter):
        builtin("de-sitter", {"k": -1})
    with pytest.raises(BadParameter):
        builtin("minkowski", {"k": 1})
    with pytest.raises(BadParameter):
        builtin("flrw-flat", {"a": "t*x"})


def test_point_mapping():
    spec = builtin("flrw-flat")
    a = eval_metric(spec, {"t": 1.0, "x": 0.0, "y": 0.0, "z": 0.0})
    b = eval_metric(spec, (1.0, 0.0, 0.0, 0.0))
    assert np.array_equal(a.g, b.g)
    with pytest.raises(UnknownCoordinate):
        eval_metric(spec, {"t": 1.0, "r": 0.0, "y": 0.0, "z": 0.0})


def test_flrw_time_derivative():
    mj = eval_metric(builtin("flrw-flat", {"a": "t^2"}), (1.0, 0, 0, 0))
    assert jet.derivative(mj.g[:, 1, 1], (1, 0, 0, 0)) == pytest.approx(4.0, abs=1e-14)


@pytest.mark.parametrize("name", list(CATALOG))
def test_inverse_identity_all_coefficients(name):
    params, sample = CATALOG[name]
    spec = builtin(name, params)
    rng = np.random.default_rng(5)
    target = np.zeros((jet.NCOEF, 4, 4))
    target[0] = np.eye(4)
    for _ in range(20):
        mj = eval_metric(spec, sample(rng))
        prod = jet.contract("ij,jk->ik", mj.g, mj.ginv)
        scale = max(1.0, float(np.max(np.abs(mj.g))) * float(np.max(np.abs(mj.ginv))))
        assert np.max(np.abs(prod - target)) <= 1e-12 * scale
        assert np.array_equal(mj.g, np.swapaxes(mj.g, 1, 2))
        assert mj.det_value < 0


@pytest.mark.parametrize("name", list(CATALOG))
def test_derivatives_match_finite_differences(name):
    params, sample = CATALOG[name]
    spec = builtin(name, params)
    rng = np.random.default_rng(8)
    h = 1e-4
    for _ in range(5):
        x = np.array(sample(rng))
        mj = eval_metric(spec, x)
        scale = max(1.0, float(np.max(np.abs(mj.g[0]))))
        for a in range(4):
            e = np.zeros(4)
            e[a] = h
            up, mid, down = metric_values(spec, x + e), metric_values(spec, x), metric_values(spec, x - e)
            d1 = (up - down) / (2 * h)
            d2 = (up - 2 * mid + down) / h**2
            alpha1 = tuple(1 if k == a else 0 for k in range(4))
            alpha2 = tuple(2 if k == a else 0 for k in range(4))
            j1 = np.array([[jet.derivative(mj.g[:, i, j], alpha1) for j in range(4)] for i in range(4)])
            j2 = np.array([[jet.derivative(mj.g[:, i, j], alpha2) for j in range(4)] for i in range(4)])
            assert np.max(np.abs(j1 - d1)) <= 1e-6 * max(scale, float(np.max(np.abs(j1))))
            assert np.max(np.abs(j2 - d2)) <= 1e-6 * max(scale, float(np.max(np.abs(j2))))


def test_generator_jet():
    spec = builtin("schwarzschild", {"M": 1.0})
    A = generator_jet(spec, (0.0, 4.0, 1.0, 0.0))
    assert A.shape == (jet.NCOEF, 4)
    assert A[0, 0] == pytest.approx(1.0 / math.sqrt(0.5))
    assert generator_jet(load_metric(MINKOWSKI), (0, 0, 0, 0)) is None

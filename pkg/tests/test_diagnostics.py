import math

import numpy as np
import pytest

from qcst import jet
from qcst.curvature import curvature_at
from qcst.diagnostics import (
    codazzi_deviation, conformally_flat, diagnose, generator_checks, generator_field,
    ricci_symmetric_deviation, semisymmetry_deviation,
)
from qcst.exceptions import MissingGeneratorField, NotUnitTimelike
from qcst.metric import builtin
from qcst.qc import detect_qc


@pytest.fixture(scope="module")
def flrw():
    spec = builtin("flrw-flat", {"a": "t^2"})
    b = curvature_at(spec, (1.0, 0.0, 0.0, 0.0))
    return spec, b, detect_qc(b)


@pytest.fixture(scope="module")
def static():
    spec = builtin("einstein-static", {"a0": 1.0})
    b = curvature_at(spec, (0.0, 1.0, 1.0, 0.5))
    return spec, b, detect_qc(b)


def test_flrw_diagnostics(flrw):
    spec, b, rep = flrw
    d = diagnose(b, rep, spec)
    assert d.div_A == pytest.approx(6.0, abs=1e-12)  # 3 a'/a
    assert d.killing_dev == pytest.approx(2.0, abs=1e-12)
    assert d.vorticity_dev <= 1e-12
    assert d.gamma_along_A == pytest.approx(-8.0, abs=1e-10)
    assert d.ricci_symmetric_dev > 1
    assert d.codazzi_dev == pytest.approx(math.sqrt(0.5), rel=1e-10)
    assert d.flags["conformally_flat"] and d.flags["irrotational"]
    assert not d.flags["killing"] and not d.flags["ricci_symmetric"] and not d.flags["codazzi"]


def test_einstein_static_is_symmetric_and_static(static):
    spec, b, rep = static
    assert rep.is_qc and (rep.gamma, rep.mu) == pytest.approx((1.0, 1.0), abs=1e-10)
    d = diagnose(b, rep, spec)
    assert d.ricci_symmetric_dev <= 1e-10
    assert d.codazzi_dev == 0.0
    assert d.semisymmetry_dev <= 1e-10
    assert d.killing_dev <= 1e-10 and d.vorticity_dev <= 1e-10 and abs(d.div_A) <= 1e-10
    assert all(d.flags.values())


def test_semisymmetry_cases():
    for name, params, x in (
        ("de-sitter", {"k": 1.0}, (0.2, 0.0, 0.3, -0.1)),
        ("schwarzschild", {"M": 1.0}, (0.0, 4.0, 1.2, 0.3)),
        ("minkowski", {}, (0.0, 0.0, 0.0, 0.0)),
    ):
        b = curvature_at(builtin(name, params), x)
        assert semisymmetry_deviation(b) <= 1e-10, name


def test_codazzi_noise_floor():
    b = curvature_at(builtin("de-sitter", {"k": 1.0}), (0.4, 0.2, -0.1, 0.7))
    assert codazzi_deviation(b) == 0.0
    assert ricci_symmetric_deviation(b) <= 1e-10


def test_conformally_flat():
    b = curvature_at(builtin("schwarzschild", {"M": 1.0}), (0.0, 3.0, 1.0, 0.0))
    assert not conformally_flat(b)
    assert conformally_flat(curvature_at(builtin("flrw-closed"), (1.0, 1.0, 1.0, 0.0)))


def test_no_generator_gives_nan():
    b = curvature_at(builtin("de-sitter", {"k": 1.0}), (0.1, 0.2, 0.3, 0.4))
    d = diagnose(b, detect_qc(b))
    assert math.isnan(d.div_A) and math.isnan(d.killing_dev)
    with pytest.raises(MissingGeneratorField):
        generator_field(b, detect_qc(b))


def test_point_values_rejected(flrw):
    _, b, rep = flrw
    with pytest.raises(MissingGeneratorField):
        generator_checks(b, rep.generator)


def test_not_unit_timelike(flrw):
    _, b, _ = flrw
    A = np.zeros((jet.NCOEF, 4))
    A[0, 0] = 2.0
    with pytest.raises(NotUnitTimelike):
        generator_checks(b, A)


def test_hint_and_extraction_agree(flrw):
    spec, b, rep = flrw
    hinted = generator_checks(b, generator_field(b, rep, spec))
    extracted = generator_checks(b, generator_field(b, rep, None))
    assert hinted.div_A == pytest.approx(extracted.div_A, abs=1e-10)
    assert hinted.killing_dev == pytest.approx(extracted.killing_dev, abs=1e-10)

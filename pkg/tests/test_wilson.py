import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from qgeo.errors import ContractError
from qgeo.fields import Curve, FluxString, GaugeFunction, UniformField, ZeroField, circle
from qgeo.wilson import (MatrixGauge, NonAbelianField, _expi_2x2, embed_abelian, expi_hermitian,
                         expi_hermitian_derivative, gauge_transform_matrix, holonomy, richardson_ratio,
                         su2_generators, unitarity_defect, wilson_line, zero_non_abelian)

T = su2_generators()


def _field():
    return NonAbelianField(T, 0.8, (UniformField((0.4, -0.1), 0.2), FluxString((0.3, 0.1), 1.1),
                                    UniformField((-0.3, 0.5), -0.1)))


def _path():
    return Curve.spatial([[-3.0, -2.0], [2.5, -1.0], [1.0, 3.0], [-2.0, 2.5]])


def test_zero_field_gives_identity():
    W = wilson_line(zero_non_abelian(2), _path(), 32)
    assert np.allclose(W, np.eye(2), atol=1e-15)


def test_generators_are_validated():
    with pytest.raises(ContractError):
        NonAbelianField(1j * T, 1.0, (ZeroField(2),) * 3)
    with pytest.raises(ContractError):
        NonAbelianField(T, 1.0, (ZeroField(2),) * 2)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=4, max_size=4), st.floats(-2, 2))
def test_closed_form_su2_matches_expm(c, m):
    h = m * np.eye(2) + sum(ci * t for ci, t in zip(c[:3], T))
    assert np.max(np.abs(_expi_2x2(h)[0] - expm(1j * h))) < 1e-13
    e = c[3] * T[0] + 0.3 * T[2]
    _, de = expi_hermitian_derivative(h, e)
    eps = 1e-6
    fd = (expm(1j * (h + eps * e)) - expm(1j * (h - eps * e))) / (2 * eps)
    assert np.max(np.abs(de - fd)) < 1e-8


def test_general_dimension_uses_eigh():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = a + a.conj().T
    assert np.max(np.abs(expi_hermitian(h) - expm(1j * h))) < 1e-12


def test_embedding_reproduces_abelian_phase():
    f = FluxString((0.0, 0.0), 1.3)
    c = Curve.spatial([[2.0, -1.0], [1.0, 2.0], [-2.0, 1.5]])
    W = wilson_line(embed_abelian(f, 1.7), c, 256, scheme="magnus4")
    assert abs(W[0, 0] - np.exp(1j * f.line_phase(c, 1.7))) < 1e-12
    loop = circle((0.0, 0.0), 2.0, 1)
    assert abs(holonomy(embed_abelian(f, 1.7), loop, 256, scheme="magnus4")[0, 0] - np.exp(1.7j * 1.3)) < 1e-12


@pytest.mark.parametrize("scheme", ["midpoint", "magnus4"])
def test_unitary_and_reversal(scheme):
    W = wilson_line(_field(), _path(), 128, scheme=scheme)
    R = wilson_line(_field(), _path().reversed(), 128, scheme=scheme)
    assert unitarity_defect(W) < 1e-12
    assert np.max(np.abs(R - W.conj().T)) < 1e-12


@pytest.mark.parametrize("scheme,expected", [("midpoint", 4.0), ("magnus4", 16.0)])
def test_richardson_order(scheme, expected):
    assert abs(richardson_ratio(_field(), _path(), 32, scheme) / expected - 1) < 0.15


def test_gauge_covariance():
    lams = tuple(GaugeFunction.random((40.0, 40.0), 3, s, amplitude=0.5) for s in range(3))
    u = MatrixGauge(T, 0.8, lams)
    path = _path()
    W = wilson_line(_field(), path, 128, scheme="magnus4")
    Wp = wilson_line(gauge_transform_matrix(_field(), u), path, 128, scheme="magnus4")
    start, end = path.vertices[0, 1:], path.vertices[-1, 1:]
    expected = u.unitary(end[None])[0] @ W @ u.unitary(start[None])[0].conj().T
    assert np.max(np.abs(Wp - expected)) < 1e-8


def test_double_winding_is_square():
    loop1 = circle((0.3, 0.1), 2.0, 1)
    loop2 = circle((0.3, 0.1), 2.0, 2)
    h1 = holonomy(_field(), loop1, 128, scheme="magnus4")
    h2 = holonomy(_field(), loop2, 128, scheme="magnus4")
    assert np.max(np.abs(h2 - h1 @ h1)) < 1e-9
    with pytest.raises(ContractError):
        holonomy(_field(), _path())


def test_too_few_steps_rejected():
    with pytest.raises(ContractError):
        wilson_line(_field(), _path(), 4)

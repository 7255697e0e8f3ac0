import numpy as np
import pytest

from qgeo.dynamics import HamiltonianSpec, HarmonicPotential, PropagatorOptions
from qgeo.errors import ContractError
from qgeo.fields import CapacitorPulse, Curve, FluxString, GaugeFunction, UniformField, ZeroField, gauge_transform, \
    gauge_transform_state
from qgeo.grid import Grid, PacketSpec, gaussian_packet, inner_product
from qgeo.modular import (U1Representation, apply_f_ell, apply_f_tau, apply_s_imag, apply_s_real, expect_f_ell,
                          expect_f_ell_direct, expect_f_tau, expect_g_gamma, modular_momentum_expectation,
                          quantize_charge)

G2 = Grid((160, 160), (40.0, 40.0))
STRING = FluxString((0.0, 0.0), 1.3)


def _packet(p=(0.0, 0.0)):
    return gaussian_packet(G2, PacketSpec((-6.0, -10.0), 1.0, p))


def test_zero_displacement_is_identity():
    psi = _packet((0.5, 0.2))
    assert abs(modular_momentum_expectation(psi, (0.0, 0.0)).value - 1) < 1e-12
    assert abs(expect_f_ell(psi, (0.0, 0.0), STRING).value - 1) < 1e-12


def test_gaussian_characteristic_function():
    psi = _packet((0.7, 0.0))
    for ell in (0.5, 2.0, 4.0):
        got = modular_momentum_expectation(psi, (ell, 0.0)).value
        assert abs(got - np.exp(-ell**2 / 8) * np.exp(-0.7j * ell)) < 1e-12


def test_hermitian_parts():
    psi = _packet((0.7, 0.0))
    s = modular_momentum_expectation(psi, (2.0, 0.0)).value
    assert abs(inner_product(psi, apply_s_real(psi, (2.0, 0.0))) - s.real) < 1e-12
    assert abs(inner_product(psi, apply_s_imag(psi, (2.0, 0.0))) - s.imag) < 1e-12


def test_zero_field_reduces_to_translation():
    psi = _packet((0.3, -0.4))
    ell = (2.0, 1.5)
    assert abs(expect_f_ell(psi, ell, ZeroField(2)).value - modular_momentum_expectation(psi, ell).value) < 1e-12


def test_direct_and_translated_paths_agree():
    psi = _packet((0.3, -0.4))
    for ell in ((8.0, 0.0), (1.3, 0.7)):
        a = expect_f_ell(psi, ell, STRING, 1.7).value
        b = expect_f_ell_direct(psi, ell, STRING, 1.7).value
        assert abs(a - b) < 1e-12


@pytest.mark.parametrize("field", [STRING, FluxString((0.0, 0.0), 1.3, "strip", (-1.0, 0.0), 0.5),
                                   UniformField((0.4, -0.3))])
def test_gauge_invariance_on_grid_aligned_displacements(field):
    psi = _packet((0.3, -0.4))
    lam = GaugeFunction.random((40.0, 40.0), 4, 11)
    ell = (8.0, 0.0)
    a = expect_f_ell(psi, ell, field, 1.7).value
    b = expect_f_ell(gauge_transform_state(psi, lam, 1.7), ell, gauge_transform(field, lam), 1.7).value
    assert abs(a - b) < 1e-10


def test_uniform_field_gives_pure_phase():
    psi = _packet()
    got = expect_f_ell(psi, (2.0, 1.0), UniformField((0.4, -0.3)), 1.5).value
    s = modular_momentum_expectation(psi, (2.0, 1.0)).value
    assert abs(got - s * np.exp(1.5j * (0.8 - 0.3))) < 1e-12


def test_single_segment_g_is_f_ell():
    psi = _packet((0.3, -0.4))
    c = Curve.spatial([[0.0, 0.0], [3.0, 1.0]])
    assert abs(expect_g_gamma(psi, c, STRING).value - expect_f_ell(psi, (3.0, 1.0), STRING).value) < 1e-14


def test_concatenation_is_operator_product():
    psi = _packet((0.3, -0.4))
    c = Curve.spatial([[0.0, 0.0], [3.0, 0.0], [3.0, 2.0]])
    two = apply_f_ell(apply_f_ell(psi, (3.0, 0.0), STRING), (0.0, 2.0), STRING)
    assert abs(expect_g_gamma(psi, c, STRING).value - inner_product(psi, two)) < 1e-14


def test_dog_leg_equals_straight_path_without_enclosed_flux():
    psi = _packet((0.3, -0.4))
    f = UniformField((0.4, -0.3))
    straight = expect_g_gamma(psi, Curve.spatial([[0.0, 0.0], [4.0, 0.0]]), f).value
    dog_leg = expect_g_gamma(psi, Curve.spatial([[0.0, 0.0], [2.0, 1.0], [4.0, 0.0]]), f).value
    assert abs(straight - dog_leg) < 1e-12


def test_f_tau():
    g = Grid((128,), (16.0,))
    psi = gaussian_packet(g, PacketSpec((0.3,), 0.7, (1.0,)))
    spec = HamiltonianSpec(1.0, 1.0, CapacitorPulse((-1.0, 1.0), 1.3, 0.2, 0.9, 0.2, "scalar"), HarmonicPotential(0.3))
    opts = PropagatorOptions(0.01, 100)
    assert apply_f_tau(psi, 0.0, spec, opts) is psi
    assert expect_f_tau(psi, 1.0, spec, opts).modulus <= 1 + 1e-12
    there_and_back = Curve(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]))
    assert abs(expect_g_gamma(psi, there_and_back, ZeroField(1), 1.0, spec, 100).value - 1) < 1e-12
    with pytest.raises(ContractError):
        apply_f_tau(psi, -1.0, spec, opts)
    with pytest.raises(ContractError):
        expect_g_gamma(psi, Curve(np.array([[0.0, 0.0], [1.0, 1.0]])), ZeroField(1), 1.0, spec)


def test_displacement_shape_checked():
    with pytest.raises(ContractError):
        expect_f_ell(_packet(), (1.0,), STRING)


@pytest.mark.parametrize("circ,q,valid,n", [(2 * np.pi, 3.0, True, 3), (2 * np.pi, 1.5, False, 2),
                                            (6 * np.pi, 1.0, True, 3), (6 * np.pi, -1.0, True, -3)])
def test_charge_quantization(circ, q, valid, n):
    res = quantize_charge(U1Representation(circ, q))
    assert res.valid is valid and res.n == n
    assert res.e0 == 2 * np.pi / circ
    with pytest.raises(ContractError):
        U1Representation(0.0, 1.0)

import numpy as np
import pytest

from oracles import dense_evolve, free_gaussian_variance
from qgeo.dynamics import (CosinePotential, GratingSpec, HamiltonianSpec, HarmonicPotential, PropagatorOptions,
                           apply_grating, band_weight, commutator_defect, default_trials, evolution_operator,
                           evolve, evolve_adjoint, generator_drift, kinetic_momentum_moment, momentum_operator,
                           potential_from_dict, translation_operator)
from qgeo.errors import ContractError
from qgeo.fields import CapacitorPulse, GaugeFunction, UniformField, gauge_transform, gauge_transform_state
from qgeo.grid import Grid, PacketSpec, gaussian_packet, inner_product, moment_expectation, parity, position_moments

G1 = Grid((512,), (64.0,))
SMALL = Grid((128,), (16.0,))


def _pulse_spec():
    return HamiltonianSpec(1.0, 1.0, CapacitorPulse((-1.0, 1.0), 1.3, 0.2, 0.9, 0.2, "scalar"), HarmonicPotential(0.3))


def test_free_spreading():
    psi = gaussian_packet(G1, PacketSpec((0.0,), 1.0, (0.5,)))
    out = evolve(psi, HamiltonianSpec(mass=2.0), PropagatorOptions.spanning(0.0, 3.0, 30))
    mean, var = position_moments(out)
    assert abs(mean - 0.5 * 3.0 / 2.0) < 1e-10
    assert abs(var - free_gaussian_variance(1.0, 2.0, 3.0)) < 1e-10


def test_coherent_state_in_harmonic_well():
    psi = gaussian_packet(G1, PacketSpec((2.0,), np.sqrt(0.5)))
    spec = HamiltonianSpec(1.0, 1.0, potential=HarmonicPotential(1.0))
    out = evolve(psi, spec, PropagatorOptions.spanning(0.0, np.pi / 2, 2000))
    mean, var = position_moments(out)
    assert abs(mean) < 1e-5 and abs(var - 0.5) < 1e-5
    assert abs(moment_expectation(out, 0, 1) + 2.0) < 1e-5


def test_round_trip_restores_state():
    psi = gaussian_packet(SMALL, PacketSpec((0.3,), 0.7, (1.0,)))
    opts = PropagatorOptions.spanning(0.0, 1.2, 50)
    back = evolve_adjoint(evolve(psi, _pulse_spec(), opts), _pulse_spec(), opts)
    assert np.max(np.abs(back.amplitudes - psi.amplitudes)) < 1e-12


def test_adjoint_is_inner_product_adjoint():
    a, b = default_trials(SMALL, 2, seed=3)
    opts = PropagatorOptions.spanning(0.0, 1.2, 40)
    lhs = inner_product(a, evolve(b, _pulse_spec(), opts))
    rhs = inner_product(evolve_adjoint(a, _pulse_spec(), opts), b)
    assert abs(lhs - rhs) < 1e-12


def test_against_dense_oracle():
    psi = gaussian_packet(SMALL, PacketSpec((0.3,), 0.7, (1.0,)))
    ref = dense_evolve(psi, _pulse_spec(), 0.0, 1.2)
    errs = []
    for steps in (200, 400):
        got = evolve(psi, _pulse_spec(), PropagatorOptions.spanning(0.0, 1.2, steps)).amplitudes[0]
        errs.append(np.linalg.norm(got - ref) * np.sqrt(SMALL.cell_volume))
    assert errs[1] < 1e-5
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_evolution_is_gauge_covariant():
    lam = GaugeFunction.random((16.0,), 3, 2, time_dependent=True)
    spec = _pulse_spec()
    spec_t = HamiltonianSpec(spec.mass, spec.charge, gauge_transform(spec.field, lam), spec.potential)
    psi = gaussian_packet(SMALL, PacketSpec((0.3,), 0.7, (1.0,)))
    opts = PropagatorOptions.spanning(0.0, 1.2, 60)
    lhs = evolve(gauge_transform_state(psi, lam, 1.0, 0.0), spec_t, opts)
    rhs = gauge_transform_state(evolve(psi, spec, opts), lam, 1.0, 1.2)
    assert np.max(np.abs(lhs.amplitudes - rhs.amplitudes)) < 1e-10


def test_translation_commutes_with_uniform_field():
    g = Grid((64, 64), (16.0, 16.0))
    spec = HamiltonianSpec(1.0, 1.0, UniformField((0.3, -0.2), 0.1))
    U = evolution_operator(spec, PropagatorOptions(0.05, 10))
    s = translation_operator((1.3, -0.7))
    assert commutator_defect(U, s, default_trials(g, 4)) < 1e-12
    trap = HamiltonianSpec(1.0, 1.0, potential=HarmonicPotential(1.0, (0.0, 0.0)))
    assert commutator_defect(evolution_operator(trap, PropagatorOptions(0.05, 10)), s, default_trials(g, 4)) > 1e-2


def test_cosine_potential_commutes_with_period_translation():
    spec = HamiltonianSpec(1.0, 1.0, potential=CosinePotential(2.0, 2.0))
    U = evolution_operator(spec, PropagatorOptions(0.05, 20))
    trials = default_trials(SMALL, 4)
    assert commutator_defect(U, translation_operator((2.0,)), trials) < 1e-12
    assert commutator_defect(U, translation_operator((1.0,)), trials) > 1e-2


def test_momentum_conserved_without_force():
    psi = gaussian_packet(G1, PacketSpec((0.0,), 1.0, (0.8,)))
    spec = HamiltonianSpec(1.0, 1.0, UniformField((0.4,)))
    assert generator_drift(psi, spec, PropagatorOptions(0.1, 20), momentum_operator()) < 1e-12


def test_parity_commutes_with_symmetric_hamiltonian():
    spec = HamiltonianSpec(1.0, 1.0, potential=HarmonicPotential(0.5))
    U = evolution_operator(spec, PropagatorOptions(0.05, 10))
    assert commutator_defect(U, parity, default_trials(SMALL, 4)) < 1e-12


def test_kinetic_momentum_is_gauge_invariant():
    psi = gaussian_packet(SMALL, PacketSpec((0.3,), 0.7, (1.0,)))
    f = UniformField((0.7,))
    lam = GaugeFunction.random((16.0,), 3, 4)
    a = kinetic_momentum_moment(psi, f, 1.0, 0.0, 2)
    b = kinetic_momentum_moment(gauge_transform_state(psi, lam), gauge_transform(f, lam), 1.0, 0.0, 2)
    assert abs(a - b) < 1e-10


def test_grating():
    g = Grid((1024,), (64.0,))
    grating = GratingSpec(4.0, 1.0)
    psi = gaussian_packet(g, PacketSpec((0.0,), 3.0))
    out = apply_grating(psi, grating)
    assert out.norm_squared() == pytest.approx(1.0, abs=1e-12)
    assert band_weight(out, 4.0, 0.6) > 0.99
    s = translation_operator((4.0,))
    assert commutator_defect(lambda p: apply_grating(p, grating), s, default_trials(g, 4)) < 1e-12
    assert np.allclose(np.abs(grating.transmission(np.linspace(0, 5, 11))), 1.0)
    with pytest.raises(ContractError):
        apply_grating(psi, GratingSpec(3.0, 1.0))


def test_contract_errors():
    with pytest.raises(ContractError):
        HamiltonianSpec(mass=0.0)
    with pytest.raises(ContractError):
        PropagatorOptions.spanning(1.0, 0.0, 10)
    psi = gaussian_packet(SMALL, PacketSpec((0.0,), 0.7))
    with pytest.raises(ContractError):
        evolve(psi.replace(2 * psi.amplitudes), HamiltonianSpec(), PropagatorOptions(0.1, 1))
    with pytest.raises(ContractError):
        potential_from_dict({"variant": "quartic"})

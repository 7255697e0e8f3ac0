"""Modular momentum, its gauge-dressed versions and U(1) charge quantization.

* ``s = exp(-i p . l)``: plain modular momentum (spectral translation by ``l``).
* ``f_l``: multiply by ``exp(i q int_x^{x+l} A . dy)`` and then translate.
* ``f_tau``: multiply by ``exp(-i q int_t^{t+tau} A0 dt)`` and then apply the
  adjoint time-ordered propagator.
* ``g_gamma``: per-segment factors along a space-time curve, applied in curve
  order, so ``f_l1 f_l2`` is ``g`` of the path "l2 then l1".
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import HamiltonianSpec, PropagatorOptions, evolve, evolve_adjoint
from .errors import ContractError, SingularityError
from .fields import AbelianField, Curve, segment_kind
from .grid import MOMENTUM, WaveFunction, inner_product, momentum_transform, translate
from .wilson import MatrixField, wilson_lines

SUPPORT_THRESHOLD = 1e-14
QUANTIZATION_TOL = 1e-9


@dataclass(frozen=True)
class ModularResult:
    value: complex
    operator_kind: str
    geometry: object
    gauge_id: str = "none"

    @property
    def modulus(self) -> float:
        return float(abs(self.value))

    @property
    def phase(self) -> float:
        return float(np.angle(self.value))


# --------------------------------------------------------------------------
# plain modular momentum


def modular_momentum_expectation(psi: WaveFunction, ell) -> ModularResult:
    """``<exp(-i p . l)>`` as the characteristic function of ``|psi(p)|^2``."""
    psi_k = psi if psi.representation == MOMENTUM else momentum_transform(psi)
    grid = psi.grid
    ell = np.broadcast_to(np.asarray(ell, dtype=float), (grid.dim,))
    phase = np.exp(-1j * sum(k * l for k, l in zip(grid.kmesh(), ell)))
    value = np.sum(psi_k.density() * phase) * grid.momentum_cell_volume
    return ModularResult(complex(value), "s", tuple(ell))


def apply_s(psi: WaveFunction, ell) -> WaveFunction:
    return translate(psi, ell)


def apply_s_real(psi: WaveFunction, ell) -> WaveFunction:
    """Hermitian part ``(s + s^+)/2 = cos(p . l)``."""
    a, b = translate(psi, ell), translate(psi, -np.asarray(ell, dtype=float))
    return psi.replace(0.5 * (a.amplitudes + b.amplitudes))


def apply_s_imag(psi: WaveFunction, ell) -> WaveFunction:
    """Hermitian ``(s - s^+)/(2i) = -sin(p . l)``."""
    a, b = translate(psi, ell), translate(psi, -np.asarray(ell, dtype=float))
    return psi.replace((a.amplitudes - b.amplitudes) / 2j)


# --------------------------------------------------------------------------
# f_l


def _support(psi: WaveFunction) -> np.ndarray:
    return np.sum(np.abs(psi.amplitudes) ** 2, axis=0) > SUPPORT_THRESHOLD


def _safe_points(psi: WaveFunction, field, ell):
    """Grid points, their displaced ends and the mask of non-singular segments."""
    grid = psi.grid
    x = grid.positions()
    ends = x + np.asarray(ell, dtype=float)
    bad = np.asarray(field.singular_mask(x, ends, min(grid.spacing)))
    if np.any(bad & _support(psi)):
        raise SingularityError("a displaced segment from the support of the state meets a singular point")
    return x, ends, ~bad


def transport_phase(psi: WaveFunction, ell, field: AbelianField, q: float, t: float = 0.0) -> np.ndarray:
    """``exp(i q int_x^{x+l} A . dy)`` on the grid; zero where the segment is singular (off support)."""
    x, ends, ok = _safe_points(psi, field, ell)
    out = np.zeros(psi.grid.shape, dtype=complex)
    out[ok] = np.exp(1j * np.asarray(field.segment_phase(x[ok], ends[ok], t, q)))
    return out


def _ell_vector(psi, ell):
    ell = np.atleast_1d(np.asarray(ell, dtype=float))
    if ell.shape != (psi.grid.dim,):
        raise ContractError(f"displacement must have {psi.grid.dim} components")
    return ell


def apply_f_ell(psi: WaveFunction, ell, field: AbelianField, q: float = 1.0, t: float = 0.0) -> WaveFunction:
    ell = _ell_vector(psi, ell)
    dressed = psi.replace(psi.amplitudes * transport_phase(psi, ell, field, q, t)[np.newaxis])
    return translate(dressed, ell)


def expect_f_ell(psi: WaveFunction, ell, field: AbelianField, q: float = 1.0, t: float = 0.0) -> ModularResult:
    value = inner_product(psi, apply_f_ell(psi, ell, field, q, t))
    return ModularResult(value, "f_ell", tuple(_ell_vector(psi, ell)), field.gauge_id)


def expect_f_ell_direct(psi: WaveFunction, ell, field: AbelianField, q: float = 1.0, t: float = 0.0) -> ModularResult:
    """``int psi^+(x + l) phase(x) psi(x) dx`` without translating the dressed state."""
    ell = _ell_vector(psi, ell)
    shifted = translate(psi, -ell)
    dressed = psi.replace(psi.amplitudes * transport_phase(psi, ell, field, q, t)[np.newaxis])
    return ModularResult(inner_product(shifted, dressed), "f_ell", tuple(ell), field.gauge_id)


# --------------------------------------------------------------------------
# f_tau


def _span(opts: PropagatorOptions, tau: float) -> PropagatorOptions:
    return PropagatorOptions.spanning(opts.t0, opts.t0 + tau, opts.steps)


def apply_f_tau(psi: WaveFunction, tau: float, spec: HamiltonianSpec, opts: PropagatorOptions) -> WaveFunction:
    """``U^+(t0 + tau, t0) exp(-i q int A0 dt) psi`` with ``t0 = opts.t0`` and ``opts.steps`` steps."""
    if tau == 0:
        return psi
    if tau < 0:
        raise ContractError("f_tau needs tau >= 0; reverse time segments go through g_gamma")
    opts = _span(opts, tau)
    x = psi.grid.positions()
    phase = np.exp(-1j * np.asarray(spec.field.time_phase(x, opts.t0, opts.t1, spec.charge)))
    return evolve_adjoint(psi.replace(psi.amplitudes * phase[np.newaxis]), spec, opts)


def expect_f_tau(psi: WaveFunction, tau: float, spec: HamiltonianSpec, opts: PropagatorOptions) -> ModularResult:
    value = inner_product(psi, apply_f_tau(psi, tau, spec, opts))
    return ModularResult(value, "f_tau", float(tau), spec.field.gauge_id)


def _inverse_f_tau(psi: WaveFunction, t_late: float, t_early: float, spec: HamiltonianSpec, steps: int):
    """Inverse of the forward factor for ``t_early -> t_late``."""
    opts = PropagatorOptions.spanning(t_early, t_late, steps)
    out = evolve(psi, spec, opts)
    x = psi.grid.positions()
    phase = np.exp(1j * np.asarray(spec.field.time_phase(x, t_early, t_late, spec.charge)))
    return out.replace(out.amplitudes * phase[np.newaxis])


# --------------------------------------------------------------------------
# g_gamma


def _matrix_f_ell(psi: WaveFunction, ell, field: MatrixField, steps: int, t: float, scheme: str):
    grid = psi.grid
    x, ends, ok = _safe_points(psi, field, ell)
    seg = Curve(np.array([[t, *np.zeros(grid.dim)], [t, *ell]]))
    d = field.matrix_dim
    if psi.internal_dim != d:
        raise ContractError(f"state has {psi.internal_dim} internal components, field acts on {d}")
    W = np.zeros(grid.shape + (d, d), dtype=complex)
    W[ok] = wilson_lines(field, seg, x[ok], steps, scheme=scheme)
    amps = np.moveaxis(psi.amplitudes, 0, -1)
    dressed = np.moveaxis(np.einsum("...ij,...j->...i", W, amps), -1, 0)
    return translate(psi.replace(dressed), ell)


def apply_g_gamma(psi: WaveFunction, curve: Curve, field, q: float = 1.0, spec: HamiltonianSpec | None = None,
                  steps: int = 256, wilson_steps: int = 256, scheme: str = "midpoint") -> WaveFunction:
    """Segment factors applied in curve order.

    Spatial segments at time ``t`` use ``f_l`` (Abelian ``field`` with charge
    ``q``) or the Wilson-line dressed translation (matrix ``field``).
    Temporal segments use ``f_tau`` going forward and its inverse going back;
    they need ``spec`` and an Abelian field.  Segments moving in space and
    time at once are not supported.
    """
    if curve.dim != psi.grid.dim:
        raise ContractError("curve and grid dimensions differ")
    out = psi
    for a, b in curve.segments():
        kind = segment_kind(a, b)
        if kind == "null":
            continue
        if kind == "mixed":
            raise ContractError("g_gamma supports purely spatial or purely temporal segments only")
        if kind == "spatial":
            ell = b[1:] - a[1:]
            if isinstance(field, MatrixField):
                out = _matrix_f_ell(out, ell, field, wilson_steps, a[0], scheme)
            else:
                out = apply_f_ell(out, ell, field, q, a[0])
            continue
        if spec is None or isinstance(field, MatrixField):
            raise ContractError("temporal segments need an Abelian Hamiltonian spec")
        if b[0] > a[0]:
            out = apply_f_tau(out, b[0] - a[0], spec, PropagatorOptions.spanning(a[0], b[0], steps))
        else:
            out = _inverse_f_tau(out, a[0], b[0], spec, steps)
    return out


def expect_g_gamma(psi: WaveFunction, curve: Curve, field, q: float = 1.0, spec: HamiltonianSpec | None = None,
                   steps: int = 256, wilson_steps: int = 256, scheme: str = "midpoint") -> ModularResult:
    value = inner_product(psi, apply_g_gamma(psi, curve, field, q, spec, steps, wilson_steps, scheme))
    gauge_id = getattr(field, "gauge_id", type(field).__name__)
    return ModularResult(value, "g_gamma", curve, gauge_id)


# --------------------------------------------------------------------------
# charge quantization


@dataclass(frozen=True)
class U1Representation:
    """Charge ``q`` of a representation of U(1) with circumference ``circumference``."""

    circumference: float
    charge: float

    def __post_init__(self):
        if not self.circumference > 0:
            raise ContractError("U(1) circumference must be positive")

    @property
    def generator(self) -> float:
        return self.charge


@dataclass(frozen=True)
class ChargeQuantization:
    valid: bool
    n: int
    e0: float


def quantize_charge(rep: U1Representation, tol: float = QUANTIZATION_TOL) -> ChargeQuantization:
    """``e0 = 2 pi / circumference``; valid iff ``q / e0`` is an integer within ``tol``."""
    e0 = 2 * np.pi / rep.circumference
    ratio = rep.charge / e0
    n = int(np.round(ratio))
    return ChargeQuantization(bool(abs(ratio - n) <= tol), n, e0)

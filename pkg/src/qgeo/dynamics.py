"""Split-operator evolution under ``H = (p - qA)^2 / 2m + q A0 + V``.

One step from ``t`` to ``t + dt`` is

    kick(t + dt/2 -> t + dt) . kinetic(A(t + dt/2), dt) . kick(t -> t + dt/2)

where a kick is ``exp(-i (V dt/2 + q int A0 dt))`` with the exact half-step
time integral of ``A0``.  The kinetic factor is applied per axis as
``exp(i q chi) exp(-i (k - q Abar)^2 dt / 2m) exp(-i q chi)``, with ``Abar``
the line mean of ``A_j`` and ``chi`` the spectral antiderivative of the
remainder.  Each step is therefore exactly gauge covariant.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np
from scipy.special import jv

from .errors import ContractError, StepSizeError
from .fields import AbelianField, ZeroField
from .grid import Grid, WaveFunction, inner_product, momentum_phase, random_band_limited_states

NORM_DRIFT_LIMIT = 1e-6


# --------------------------------------------------------------------------
# external potentials


@dataclass(frozen=True)
class ZeroPotential:
    def __call__(self, x):
        return np.zeros(np.shape(x)[:-1])

    def to_dict(self):
        return {"variant": "zero"}


@dataclass(frozen=True)
class HarmonicPotential:
    """``V = stiffness/2 * |x - center|^2``."""

    stiffness: float
    center: tuple = (0.0,)

    def __call__(self, x):
        r = np.asarray(x, dtype=float) - np.asarray(self.center)
        return 0.5 * self.stiffness * np.sum(r * r, axis=-1)

    def to_dict(self):
        return {"variant": "harmonic", "stiffness": self.stiffness, "center": list(self.center)}


@dataclass(frozen=True)
class CosinePotential:
    """``V = amplitude * cos(2 pi x_axis / period)``."""

    amplitude: float
    period: float
    axis: int = 0

    def __call__(self, x):
        return self.amplitude * np.cos(2 * np.pi * np.asarray(x)[..., self.axis] / self.period)

    def to_dict(self):
        return {"variant": "cosine", "amplitude": self.amplitude, "period": self.period, "axis": self.axis}


@dataclass(frozen=True)
class GaussianPotential:
    amplitude: float
    center: tuple = (0.0,)
    width: float = 1.0

    def __call__(self, x):
        r = np.asarray(x, dtype=float) - np.asarray(self.center)
        return self.amplitude * np.exp(-0.5 * np.sum(r * r, axis=-1) / self.width**2)

    def to_dict(self):
        return {"variant": "gaussian", "amplitude": self.amplitude, "center": list(self.center), "width": self.width}


def potential_from_dict(tree: dict | None):
    if not tree or tree.get("variant", "zero") == "zero":
        return ZeroPotential()
    v = tree["variant"]
    if v == "harmonic":
        return HarmonicPotential(float(tree["stiffness"]), tuple(tree.get("center", (0.0,))))
    if v == "cosine":
        return CosinePotential(float(tree["amplitude"]), float(tree["period"]), int(tree.get("axis", 0)))
    if v == "gaussian":
        return GaussianPotential(float(tree["amplitude"]), tuple(tree.get("center", (0.0,))), float(tree.get("width", 1.0)))
    raise ContractError(f"unknown potential variant {v!r}")


# --------------------------------------------------------------------------
# specs


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    mass: float = 1.0
    charge: float = 1.0
    field: AbelianField = dc_field(default_factory=ZeroField)
    potential: Callable = dc_field(default_factory=ZeroPotential)

    def __post_init__(self):
        if not self.mass > 0:
            raise ContractError("mass must be positive")

    @property
    def static(self) -> bool:
        return bool(self.field.static)


@dataclass(frozen=True)
class PropagatorOptions:
    """``steps`` Strang steps of size ``dt`` starting at ``t0``."""

    dt: float
    steps: int
    t0: float = 0.0

    def __post_init__(self):
        if not self.dt > 0 or int(self.steps) < 1:
            raise ContractError("need dt > 0 and steps >= 1")
        object.__setattr__(self, "steps", int(self.steps))

    @classmethod
    def spanning(cls, t0: float, t1: float, steps: int) -> "PropagatorOptions":
        if t1 <= t0:
            raise ContractError("evolution interval must have t1 > t0")
        return cls((t1 - t0) / steps, steps, t0)

    @property
    def duration(self) -> float:
        return self.dt * self.steps

    @property
    def t1(self) -> float:
        return self.t0 + self.duration

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps + 1)


# --------------------------------------------------------------------------
# step factors


def _axis_antiderivative(values, grid: Grid, axis: int):
    """Line mean and zero-mean spectral antiderivative of ``values`` along ``axis``."""
    mean = values.mean(axis=axis, keepdims=True)
    k = grid.wavenumbers[axis]
    spec = np.fft.fft(values - mean, axis=axis)
    shape = [1] * grid.dim
    shape[axis] = -1
    kk = k.reshape(shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(kk != 0, spec / (1j * kk), 0.0)
    n = grid.points[axis]
    if n % 2 == 0:
        # drop the unpaired Nyquist mode so chi stays real
        idx = [slice(None)] * grid.dim
        idx[axis] = n // 2
        ratio[tuple(idx)] = 0.0
    return mean, np.fft.ifft(ratio, axis=axis).real


class _Stepper:
    """Builds and applies the per-step factors for one Hamiltonian on one grid."""

    def __init__(self, grid: Grid, spec: HamiltonianSpec):
        self.grid = grid
        self.spec = spec
        self.x = grid.positions()
        self.v = np.asarray(spec.potential(self.x), dtype=float)
        if not np.all(np.isfinite(self.v)):
            raise ContractError("external potential is not finite on the grid")
        self._static_cache = {}

    def kick(self, t0, t1, sign=-1):
        q = self.spec.charge
        phase = self.v * (t1 - t0) + np.asarray(self.spec.field.time_phase(self.x, t0, t1, q, panels=1))
        return np.exp(1j * sign * phase)

    def kinetic_parts(self, t):
        A, _ = self.spec.field.potential(self.x, t)
        parts = []
        for axis in range(self.grid.dim):
            a = np.asarray(A[..., axis], dtype=float)
            if not np.any(a):
                parts.append((None, np.zeros((1,) * self.grid.dim)))
                continue
            mean, chi = _axis_antiderivative(a, self.grid, axis)
            parts.append((np.exp(1j * self.spec.charge * chi), mean))
        return parts

    def apply_kinetic(self, amps, t, dt, sign=-1):
        key = ("kin", dt, sign)
        if self.spec.static and key in self._static_cache:
            parts = self._static_cache[key]
        else:
            parts = self._kinetic_factors(t, dt, sign)
            if self.spec.static:
                self._static_cache[key] = parts
        order = list(range(self.grid.dim))
        sequence = order[:-1] + [order[-1]] + order[:-1][::-1]
        for i, axis in enumerate(sequence):
            half = self.grid.dim > 1 and axis != order[-1]
            gauge, prop = parts[axis][1] if half else parts[axis][0]
            amps = self._apply_axis(amps, axis, gauge, prop)
        return amps

    def _kinetic_factors(self, t, dt, sign):
        out = []
        m, q = self.spec.mass, self.spec.charge
        shape = [1] * self.grid.dim
        for axis, (gauge, mean) in enumerate(self.kinetic_parts(t)):
            shape_k = list(shape)
            shape_k[axis] = -1
            k = self.grid.wavenumbers[axis].reshape(shape_k)
            facs = []
            for frac in (1.0, 0.5):
                facs.append((gauge, np.exp(sign * 1j * (k - q * mean) ** 2 * frac * dt / (2 * m))))
            out.append(tuple(facs))
        return out

    @staticmethod
    def _apply_axis(amps, axis, gauge, prop):
        ax = axis + 1
        if gauge is not None:
            amps = amps * np.conj(gauge)
        amps = np.fft.ifft(np.fft.fft(amps, axis=ax) * prop, axis=ax)
        if gauge is not None:
            amps = amps * gauge
        return amps

    def kick_pair(self, t, dt, sign):
        key = ("kick", dt, sign)
        if self.spec.static and key in self._static_cache:
            return self._static_cache[key]
        tm = t + 0.5 * dt
        pair = (self.kick(t, tm, sign), self.kick(tm, t + dt, sign))
        if self.spec.static:
            self._static_cache[key] = pair
        return pair

    def step(self, amps, t, dt):
        k1, k2 = self.kick_pair(t, dt, -1)
        amps = amps * k1
        amps = self.apply_kinetic(amps, t + 0.5 * dt, dt, -1)
        return amps * k2

    def step_adjoint(self, amps, t, dt):
        k1, k2 = self.kick_pair(t, dt, +1)
        amps = amps * k2
        amps = self.apply_kinetic(amps, t + 0.5 * dt, dt, +1)
        return amps * k1


def _check_input(psi: WaveFunction):
    if psi.representation != "position":
        raise ContractError("evolution needs a position-representation state")
    if abs(psi.norm_squared() - 1.0) > 1e-8:
        raise ContractError("evolution needs a normalized state")


def _finish(psi: WaveFunction, amps) -> WaveFunction:
    out = psi.replace(amps)
    drift = abs(out.norm_squared() - 1.0)
    if not np.isfinite(drift) or drift > NORM_DRIFT_LIMIT:
        raise StepSizeError(f"norm drift {drift:.3g} during evolution")
    return out


def evolve(psi: WaveFunction, spec: HamiltonianSpec, opts: PropagatorOptions) -> WaveFunction:
    """Time-ordered propagator from ``opts.t0`` to ``opts.t1`` applied to ``psi``."""
    _check_input(psi)
    stepper = _Stepper(psi.grid, spec)
    amps = np.asarray(psi.amplitudes, dtype=complex)
    for n in range(opts.steps):
        amps = stepper.step(amps, opts.t0 + n * opts.dt, opts.dt)
    return _finish(psi, amps)


def evolve_adjoint(psi: WaveFunction, spec: HamiltonianSpec, opts: PropagatorOptions) -> WaveFunction:
    """Adjoint of :func:`evolve`: per-step adjoints in reversed order."""
    _check_input(psi)
    stepper = _Stepper(psi.grid, spec)
    amps = np.asarray(psi.amplitudes, dtype=complex)
    for n in reversed(range(opts.steps)):
        amps = stepper.step_adjoint(amps, opts.t0 + n * opts.dt, opts.dt)
    return _finish(psi, amps)


def trajectory(psi: WaveFunction, spec: HamiltonianSpec, opts: PropagatorOptions, every: int = 1):
    """Yield ``(t, psi_t)`` every ``every`` steps, starting with the input."""
    _check_input(psi)
    stepper = _Stepper(psi.grid, spec)
    amps = np.asarray(psi.amplitudes, dtype=complex)
    yield opts.t0, psi
    for n in range(opts.steps):
        amps = stepper.step(amps, opts.t0 + n * opts.dt, opts.dt)
        if (n + 1) % every == 0 or n + 1 == opts.steps:
            yield opts.t0 + (n + 1) * opts.dt, psi.replace(amps.copy())


# --------------------------------------------------------------------------
# symmetry checks


def commutator_defect(apply_U: Callable, apply_s: Callable, trial_states: Sequence[WaveFunction]) -> float:
    """``max_psi || U s psi - s U psi ||`` over the trial states."""
    worst = 0.0
    for psi in trial_states:
        a = apply_U(apply_s(psi))
        b = apply_s(apply_U(psi))
        diff = a.replace(a.amplitudes - b.amplitudes)
        worst = max(worst, float(np.sqrt(diff.norm_squared())))
    return worst


def default_trials(grid: Grid, count: int = 16, seed: int = 0, internal_dim: int = 1):
    """Seeded battery of band-limited trial states for defect estimates."""
    return random_band_limited_states(grid, count=count, seed=seed, internal_dim=internal_dim)


def expectation(psi: WaveFunction, Q_apply: Callable) -> complex:
    return inner_product(psi, Q_apply(psi))


def generator_drift(psi: WaveFunction, spec: HamiltonianSpec, opts: PropagatorOptions, Q_apply: Callable) -> float:
    """``|<Q>_{t1} - <Q>_{t0}|`` under :func:`evolve`."""
    before = expectation(psi, Q_apply)
    after = expectation(evolve(psi, spec, opts), Q_apply)
    return float(abs(after - before))


def momentum_operator(axis: int = 0) -> Callable:
    def apply(psi: WaveFunction) -> WaveFunction:
        shape = [1] * psi.grid.dim
        shape[axis] = -1
        k = psi.grid.wavenumbers[axis].reshape(shape)
        ax = axis + 1
        return psi.replace(np.fft.ifft(np.fft.fft(psi.amplitudes, axis=ax) * k, axis=ax))
    return apply


def translation_operator(displacement) -> Callable:
    """Spectral translation ``exp(-i p . l)``."""
    def apply(psi: WaveFunction) -> WaveFunction:
        phase = momentum_phase(psi.grid, displacement)
        axes = tuple(range(1, psi.grid.dim + 1))
        return psi.replace(np.fft.ifftn(np.fft.fftn(psi.amplitudes, axes=axes) * phase, axes=axes))
    return apply


def evolution_operator(spec: HamiltonianSpec, opts: PropagatorOptions) -> Callable:
    """``psi -> U psi`` without the normalisation precondition (for linear checks)."""
    def apply(psi: WaveFunction) -> WaveFunction:
        stepper = _Stepper(psi.grid, spec)
        amps = np.asarray(psi.amplitudes, dtype=complex)
        for n in range(opts.steps):
            amps = stepper.step(amps, opts.t0 + n * opts.dt, opts.dt)
        return psi.replace(amps)
    return apply


# --------------------------------------------------------------------------
# kinetic momentum


def kinetic_momentum_moment(psi: WaveFunction, field: AbelianField, q: float, t: float, n: int, axis: int = 0) -> float:
    """Gauge-invariant ``<psi| (p - qA)^n |psi>`` along ``axis`` at time ``t``."""
    grid = psi.grid
    A, _ = field.potential(grid.positions(), t)
    a = np.asarray(A[..., axis], dtype=float)
    mean, chi = _axis_antiderivative(a, grid, axis)
    phi = psi.amplitudes * np.exp(-1j * q * chi)
    ax = axis + 1
    spec = np.fft.fft(phi, axis=ax)
    shape = [1] * grid.dim
    shape[axis] = -1
    k = grid.wavenumbers[axis].reshape(shape)
    weight = np.abs(spec) ** 2
    kin = k - q * mean
    return float(np.sum(weight * kin**n) / np.sum(weight))


def kinetic_energy_moment(psi: WaveFunction, spec: HamiltonianSpec, t: float, n: int, axis: int = 0) -> float:
    """``<((p - qA)^2 / 2m)^n>`` along one axis (1D kinetic energy)."""
    return kinetic_momentum_moment(psi, spec.field, spec.charge, t, 2 * n, axis) / (2 * spec.mass) ** n


# --------------------------------------------------------------------------
# grating


@dataclass(frozen=True)
class GratingSpec:
    """Thin periodic phase grating ``T(y) = amplitude * exp(i strength cos(2 pi y / period))``.

    A pure phase grating (``amplitude = 1``) is unitary and commutes with
    translation by ``period``.
    """

    period: float
    strength: float = 1.0
    amplitude: float = 1.0
    axis: int = 0
    min_periods: int = 8

    def __post_init__(self):
        if not self.period > 0:
            raise ContractError("grating period must be positive")
        if not 0 < self.amplitude <= 1:
            raise ContractError("grating amplitude must lie in (0, 1]")

    def periods_in(self, grid: Grid) -> int:
        L = grid.lengths[self.axis]
        N = grid.points[self.axis]
        M = L / self.period
        if abs(M - round(M)) > 1e-9 or round(M) < self.min_periods:
            raise ContractError(f"grating period {self.period} is not commensurate with L = {L} (need integer M >= {self.min_periods})")
        M = int(round(M))
        if N % M:
            raise ContractError("grating period must be a whole number of grid cells")
        return M

    def highest_harmonic(self, tol: float = 1e-16) -> int:
        n = 0
        while abs(jv(n + 1, self.strength)) > tol or n + 1 <= abs(self.strength):
            n += 1
        return n

    def transmission(self, y):
        return self.amplitude * np.exp(1j * self.strength * np.cos(2 * np.pi * np.asarray(y) / self.period))

    def check(self, grid: Grid):
        self.periods_in(grid)
        kmax = self.highest_harmonic() * 2 * np.pi / self.period
        nyquist = np.pi / grid.spacing[self.axis]
        if kmax >= nyquist / 2:
            raise ContractError("grating harmonics exceed half the Nyquist wavenumber")

    def to_dict(self):
        return {"period": self.period, "strength": self.strength, "amplitude": self.amplitude, "axis": self.axis}


def apply_grating(psi: WaveFunction, g: GratingSpec) -> WaveFunction:
    """Multiply by the transmission profile and renormalise."""
    g.check(psi.grid)
    y = psi.grid.mesh()[g.axis]
    out = psi.replace(psi.amplitudes * g.transmission(y)[np.newaxis])
    return out.normalized()


def band_weight(psi: WaveFunction, period: float, half_width: float, axis: int = 0) -> float:
    """Fraction of momentum weight within ``half_width`` of the comb ``2 pi n / period``."""
    grid = psi.grid
    ax = axis + 1
    spec = np.abs(np.fft.fft(psi.amplitudes, axis=ax)) ** 2
    spec = spec.sum(axis=tuple(i for i in range(spec.ndim) if i != ax))
    k = grid.wavenumbers[axis]
    g = 2 * np.pi / period
    dist = np.abs(k - g * np.round(k / g))
    return float(spec[dist <= half_width].sum() / spec.sum())

"""Fubini-Study distance between rays and the metrics induced by translations and clocks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, RangeError
from .grid import NORM_ATOL, WaveFunction, inner_product, momentum_transform, position_moments, translate

RANGE_FACTOR = 1e-2
CORRECTION_LIMIT = 1e-2


def _infidelity(psi: WaveFunction, phi: WaveFunction) -> float:
    """``1 - |<psi|phi>|^2`` as the squared norm of the part of ``phi`` orthogonal to ``psi``."""
    for s in (psi, phi):
        if abs(s.norm_squared() - 1.0) > NORM_ATOL:
            raise ContractError("Fubini-Study distance needs normalized states")
    c = inner_product(psi, phi)
    residual = phi.replace(phi.amplitudes - c * psi.amplitudes)
    return max(residual.norm_squared(), 0.0)


def fubini_study_distance(psi, phi) -> float:
    """``2 sqrt(1 - |<psi|phi>|^2)`` for wave functions or plain normalized vectors."""
    if isinstance(psi, WaveFunction):
        return 2.0 * np.sqrt(_infidelity(psi, phi))
    a = np.asarray(psi, dtype=complex).ravel()
    b = np.asarray(phi, dtype=complex).ravel()
    for v in (a, b):
        if abs(np.vdot(v, v).real - 1.0) > NORM_ATOL:
            raise ContractError("Fubini-Study distance needs normalized states")
    c = np.vdot(a, b)
    return 2.0 * np.sqrt(max(np.vdot(b - c * a, b - c * a).real, 0.0))


def _unit(direction, dim):
    d = np.broadcast_to(np.asarray(direction, dtype=float), (dim,))
    n = np.linalg.norm(d)
    if n == 0:
        raise ContractError("direction must be non-zero")
    return d / n


def _projected_momentum_spread(psi: WaveFunction, u) -> float:
    """``Delta(p . u)`` from momentum moments."""
    psi_k = momentum_transform(psi)
    pu = sum(k * c for k, c in zip(psi.grid.kmesh(), u))
    w = psi_k.density() * psi.grid.momentum_cell_volume
    m1 = float(np.sum(w * pu))
    m2 = float(np.sum(w * pu * pu))
    return float(np.sqrt(max(m2 - m1 * m1, 0.0)))


def translation_metric_ratio(psi: WaveFunction, direction=1.0, dl: float = 1e-3) -> float:
    """``dS/dl`` for a translation by ``dl`` along ``direction``; tends to ``2 Delta p``."""
    u = _unit(direction, psi.grid.dim)
    spread = np.sqrt(sum(position_moments(psi, a)[1] * c * c for a, c in enumerate(u)))
    if dl <= 0 or dl > RANGE_FACTOR * spread:
        raise RangeError(f"dl = {dl} outside (0, {RANGE_FACTOR} * position spread = {RANGE_FACTOR * spread:.3g}]")
    ratio = fubini_study_distance(psi, translate(psi, dl * u)) / dl
    target = 2 * _projected_momentum_spread(psi, u)
    if target > 0 and abs(ratio / target - 1) > CORRECTION_LIMIT:
        raise RangeError(f"quadratic correction {abs(ratio / target - 1):.3g} exceeds {CORRECTION_LIMIT}")
    return float(ratio)


def metric_order_ratios(psi: WaveFunction, direction=1.0, dls=(0.1, 0.05, 0.025, 0.0125)) -> np.ndarray:
    """Shrink factors of ``|dS/dl - 2 Delta p|`` per halving of ``dl`` (about 4 for a second-order residual)."""
    u = _unit(direction, psi.grid.dim)
    target = 2 * _projected_momentum_spread(psi, u)
    res = np.array([abs(fubini_study_distance(psi, translate(psi, d * u)) / d - target) for d in dls])
    return res[:-1] / res[1:]


@dataclass(frozen=True)
class ClockSystem:
    energies: tuple
    amplitudes: tuple

    def __post_init__(self):
        E = np.asarray(self.energies, dtype=float).ravel()
        c = np.asarray(self.amplitudes, dtype=complex).ravel()
        if E.size < 2 or c.size != E.size:
            raise ContractError("clock needs >= 2 levels with one amplitude per level")
        if abs(np.vdot(c, c).real - 1.0) > NORM_ATOL:
            raise ContractError("clock amplitudes must be normalized")
        object.__setattr__(self, "energies", tuple(E))
        object.__setattr__(self, "amplitudes", tuple(c))

    @classmethod
    def random(cls, levels: int, seed: int = 0, energy_scale: float = 1.0) -> "ClockSystem":
        rng = np.random.default_rng(seed)
        c = rng.standard_normal(levels) + 1j * rng.standard_normal(levels)
        return cls(tuple(energy_scale * rng.uniform(-1, 1, levels)), tuple(c / np.linalg.norm(c)))

    @property
    def state(self) -> np.ndarray:
        return np.asarray(self.amplitudes)

    @property
    def energy_spread(self) -> float:
        p = np.abs(self.state) ** 2
        E = np.asarray(self.energies)
        return float(np.sqrt(max(np.sum(p * E * E) - np.sum(p * E) ** 2, 0.0)))

    def evolved(self, dt: float) -> np.ndarray:
        return self.state * np.exp(-1j * np.asarray(self.energies) * dt)


def clock_metric_ratio(clock: ClockSystem, dt: float = 1e-3) -> float:
    """``dS/dt`` under ``c_i -> c_i exp(-i E_i dt)``; tends to ``2 Delta E``."""
    spread = clock.energy_spread
    if dt <= 0 or dt * spread > RANGE_FACTOR:
        raise RangeError(f"dt * Delta E = {dt * spread:.3g} outside (0, {RANGE_FACTOR}]")
    return float(fubini_study_distance(clock.state, clock.evolved(dt)) / dt)


def clock_time(clock: ClockSystem, dt: float) -> float:
    """Elapsed time read off the ray distance, ``t = S / (2 Delta E)``."""
    spread = clock.energy_spread
    if spread == 0:
        raise ContractError("a stationary state cannot serve as a clock")
    return fubini_study_distance(clock.state, clock.evolved(dt)) / (2 * spread)

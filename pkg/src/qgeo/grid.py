"""Periodic uniform grids, wave functions and spectral kernels.

Units are natural (hbar = 1).  Amplitudes are stored with the internal
(spinor/colour) index first, so a scalar 1D state of ``N`` points has
shape ``(1, N)`` and a two-component 2D state has shape ``(2, Nx, Ny)``.

Momentum-space amplitudes use the unitary continuum convention::

    psi~(k) = (2 pi)^(-d/2) * sum_x psi(x) exp(-i k.x) dx^d

so that ``sum |psi|^2 dx^d == sum |psi~|^2 dk^d`` (Parseval).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ContractError, DomainError, ResolutionError

POSITION = "position"
MOMENTUM = "momentum"

MIN_POINTS = 16
TAIL_GUARD = 1e-10
NORM_ATOL = 1e-10


def _as_tuple(value, dim=None, cast=float):
    if np.ndim(value) == 0 or (dim is not None and len(value) == 1):
        value = [np.ravel(value)[0]] * (dim or 1)
    return tuple(cast(v) for v in value)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[-L/2, L/2)`` along each axis."""

    points: tuple
    lengths: tuple

    def __post_init__(self):
        points = _as_tuple(self.points, cast=int)
        lengths = _as_tuple(self.lengths, dim=len(points))
        if len(points) not in (1, 2):
            raise ContractError(f"grid dimension must be 1 or 2, got {len(points)}")
        if len(lengths) != len(points):
            raise ContractError("points and lengths must have the same dimension")
        if any(n < MIN_POINTS for n in points):
            raise ContractError(f"need at least {MIN_POINTS} points per axis, got {points}")
        if any(not np.isfinite(L) or L <= 0 for L in lengths):
            raise ContractError(f"lengths must be positive and finite, got {lengths}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "lengths", lengths)

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple:
        return self.points

    @property
    def spacing(self) -> tuple:
        return tuple(L / n for L, n in zip(self.lengths, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def momentum_cell_volume(self) -> float:
        return float(np.prod([2 * np.pi / L for L in self.lengths]))

    @cached_property
    def axes(self) -> tuple:
        """1D coordinate arrays, one per axis."""
        return tuple(-L / 2 + d * np.arange(n) for L, d, n in zip(self.lengths, self.spacing, self.points))

    @cached_property
    def wavenumbers(self) -> tuple:
        """1D wavenumber arrays in FFT ordering."""
        return tuple(2 * np.pi * np.fft.fftfreq(n, d) for n, d in zip(self.points, self.spacing))

    def mesh(self) -> tuple:
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    def kmesh(self) -> tuple:
        return tuple(np.meshgrid(*self.wavenumbers, indexing="ij"))

    def positions(self) -> np.ndarray:
        """All grid points as an array of shape ``shape + (dim,)``."""
        return np.stack(self.mesh(), axis=-1)

    def contains(self, point) -> bool:
        point = np.atleast_1d(np.asarray(point, dtype=float))
        half = np.asarray(self.lengths) / 2
        return point.shape == (self.dim,) and bool(np.all((point >= -half) & (point < half)))


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitudes on a :class:`Grid`, in position or momentum representation."""

    grid: Grid
    amplitudes: np.ndarray
    representation: str = POSITION

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape == self.grid.shape:
            amps = amps[np.newaxis]
        if amps.ndim != self.grid.dim + 1 or amps.shape[1:] != self.grid.shape:
            raise ContractError(f"amplitude shape {amps.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(amps)):
            raise ContractError("amplitudes must be finite")
        if self.representation not in (POSITION, MOMENTUM):
            raise ContractError(f"unknown representation {self.representation!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def internal_dim(self) -> int:
        return self.amplitudes.shape[0]

    def _volume(self) -> float:
        return self.grid.cell_volume if self.representation == POSITION else self.grid.momentum_cell_volume

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self._volume())

    def normalized(self) -> "WaveFunction":
        n2 = self.norm_squared()
        if n2 == 0:
            raise ContractError("cannot normalize the zero state")
        return self.replace(self.amplitudes / np.sqrt(n2))

    def replace(self, amplitudes, representation=None) -> "WaveFunction":
        return WaveFunction(self.grid, amplitudes, representation or self.representation)

    def density(self) -> np.ndarray:
        """Probability density summed over internal components."""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)


def _spatial_axes(grid: Grid) -> tuple:
    return tuple(range(1, grid.dim + 1))


def _fft_scale(grid: Grid) -> float:
    return float(np.prod([d / np.sqrt(2 * np.pi) for d in grid.spacing]))


def _require(psi: WaveFunction, representation: str):
    if psi.representation != representation:
        raise ContractError(f"expected {representation} representation, got {psi.representation}")


def _require_normalized(psi: WaveFunction):
    n2 = psi.norm_squared()
    if abs(n2 - 1) > NORM_ATOL:
        raise ContractError(f"state must be normalized (norm^2 = {n2!r})")


def momentum_transform(psi: WaveFunction) -> WaveFunction:
    _require(psi, POSITION)
    out = np.fft.fftn(psi.amplitudes, axes=_spatial_axes(psi.grid)) * _fft_scale(psi.grid)
    return psi.replace(out, MOMENTUM)


def position_transform(psi_k: WaveFunction) -> WaveFunction:
    _require(psi_k, MOMENTUM)
    out = np.fft.ifftn(psi_k.amplitudes, axes=_spatial_axes(psi_k.grid)) / _fft_scale(psi_k.grid)
    return psi_k.replace(out, POSITION)


def momentum_phase(grid: Grid, displacement) -> np.ndarray:
    """``exp(-i k . displacement)`` on the wavenumber mesh."""
    ell = np.broadcast_to(np.asarray(displacement, dtype=float), (grid.dim,))
    phase = sum(k * l for k, l in zip(grid.kmesh(), ell))
    return np.exp(-1j * phase)


def translate(psi: WaveFunction, displacement) -> WaveFunction:
    """Apply ``exp(-i p.l)``, shifting the state by ``displacement`` (any real vector)."""
    _require(psi, POSITION)
    axes = _spatial_axes(psi.grid)
    spec = np.fft.fftn(psi.amplitudes, axes=axes) * momentum_phase(psi.grid, displacement)
    return psi.replace(np.fft.ifftn(spec, axes=axes))


def inner_product(psi: WaveFunction, phi: WaveFunction) -> complex:
    """``<psi|phi>``, conjugate-linear in the first argument."""
    if psi.grid != phi.grid:
        raise ContractError("inner product of states on different grids")
    if psi.representation != phi.representation:
        raise ContractError("inner product of states in different representations")
    if psi.internal_dim != phi.internal_dim:
        raise ContractError("inner product of states with different internal dimension")
    return complex(np.vdot(psi.amplitudes, phi.amplitudes) * psi._volume())


def moment_expectation(psi: WaveFunction, axis: int, n: int) -> float:
    """``<p^n>`` along ``axis``, summed over the momentum grid."""
    if not 0 <= n <= 8:
        raise ContractError(f"moment order must be in 0..8, got {n}")
    if not 0 <= axis < psi.grid.dim:
        raise ContractError(f"axis {axis} out of range for a {psi.grid.dim}D grid")
    _require_normalized(psi)
    psi_k = psi if psi.representation == MOMENTUM else momentum_transform(psi)
    k = psi_k.grid.kmesh()[axis]
    value = np.sum(psi_k.density() * k.astype(complex) ** n) * psi.grid.momentum_cell_volume
    if abs(value.imag) > 1e-10:
        raise ContractError(f"moment has imaginary residue {value.imag!r}")
    return float(value.real)


def momentum_uncertainty(psi: WaveFunction, axis: int = 0) -> float:
    p1 = moment_expectation(psi, axis, 1)
    p2 = moment_expectation(psi, axis, 2)
    return float(np.sqrt(max(p2 - p1 * p1, 0.0)))


def position_moments(psi: WaveFunction, axis: int = 0) -> tuple:
    """Mean and variance of position along ``axis`` (non-periodic reading)."""
    _require(psi, POSITION)
    rho = psi.density() * psi.grid.cell_volume
    x = psi.grid.mesh()[axis]
    total = rho.sum()
    mean = np.sum(rho * x) / total
    var = np.sum(rho * (x - mean) ** 2) / total
    return float(mean), float(var)


def superpose_packets(phi1: WaveFunction, phi2: WaveFunction, alpha: float) -> WaveFunction:
    """Normalized ``phi1 + exp(i alpha) phi2``."""
    _require_normalized(phi1)
    _require_normalized(phi2)
    overlap = inner_product(phi1, phi2)
    weight = np.exp(1j * alpha)
    norm = np.sqrt(2 + 2 * (weight * overlap).real)
    return phi1.replace((phi1.amplitudes + weight * phi2.amplitudes) / norm)


def parity(psi: WaveFunction) -> WaveFunction:
    """Reflect ``x -> -x`` about the grid origin (exact index map)."""
    _require(psi, POSITION)
    amps = psi.amplitudes
    for axis in _spatial_axes(psi.grid):
        amps = np.roll(np.flip(amps, axis=axis), 1, axis=axis)
    return psi.replace(amps)


# --------------------------------------------------------------------------
# packets

_BUMP_SD = None


def _bump_sd_ratio() -> float:
    # standard deviation of exp(-2/(1-u^2)) on (-1, 1), the bump's |psi|^2
    global _BUMP_SD
    if _BUMP_SD is None:
        from scipy.integrate import quad

        def density(u):
            return np.exp(-2.0 / (1.0 - u * u))

        norm = quad(density, -1, 1, epsabs=1e-15, epsrel=1e-13)[0]
        second = quad(lambda u: u * u * density(u), -1, 1, epsabs=1e-15, epsrel=1e-13)[0]
        _BUMP_SD = float(np.sqrt(second / norm))
    return _BUMP_SD


@dataclass(frozen=True)
class PacketSpec:
    """Minimum-uncertainty (``gaussian``) or compactly supported (``bump``) packet.

    ``width`` is the standard deviation of ``|psi|^2`` per axis for both
    profiles.  The bump profile ``exp(-1/(1-u^2))`` vanishes identically beyond
    ``support_radius`` and is used where packets must not overlap at all.
    """

    center: tuple
    width: tuple
    mean_momentum: tuple = (0.0,)
    phase: float = 0.0
    profile: str = "gaussian"
    internal: tuple = field(default=(1.0,))

    def __post_init__(self):
        center = _as_tuple(self.center)
        dim = len(center)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "width", _as_tuple(self.width, dim))
        object.__setattr__(self, "mean_momentum", _as_tuple(self.mean_momentum, dim))
        object.__setattr__(self, "internal", tuple(complex(c) for c in np.atleast_1d(self.internal)))
        if len(self.width) != dim or len(self.mean_momentum) != dim:
            raise ContractError("center, width and mean_momentum must share a dimension")
        if any(w <= 0 for w in self.width):
            raise ContractError(f"packet width must be positive, got {self.width}")
        if self.profile not in ("gaussian", "bump"):
            raise ContractError(f"unknown packet profile {self.profile!r}")

    @property
    def support_radius(self) -> tuple:
        """Per-axis half-width of the exact support (bump) or of the 1e-10 tail (gaussian)."""
        if self.profile == "bump":
            return tuple(w / _bump_sd_ratio() for w in self.width)
        return tuple(w * np.sqrt(-4 * np.log(TAIL_GUARD)) for w in self.width)


def _profile_1d(u: np.ndarray, width: float, profile: str) -> np.ndarray:
    if profile == "gaussian":
        return np.exp(-(u * u) / (4 * width * width))
    radius = width / _bump_sd_ratio()
    s = u / radius
    inside = np.abs(s) < 1
    out = np.zeros_like(u)
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2) + 1.0)
    return out


def gaussian_packet(grid: Grid, spec: PacketSpec) -> WaveFunction:
    """Normalized packet centred at ``spec.center`` with real positive peak phase.

    Raises:
        ResolutionError: width below four grid spacings.
        DomainError: centre outside the domain or tails above 1e-10 at its edge.
    """
    if len(spec.center) != grid.dim:
        raise ContractError(f"packet dimension {len(spec.center)} != grid dimension {grid.dim}")
    for w, dx in zip(spec.width, grid.spacing):
        if w < 4 * dx:
            raise ResolutionError(f"packet width {w} below 4 grid spacings ({4 * dx})")
    if not grid.contains(spec.center):
        raise DomainError(f"packet center {spec.center} outside domain")

    amps = np.ones(grid.shape, dtype=complex)
    for axis, (x, c, w, p) in enumerate(zip(grid.axes, spec.center, spec.width, spec.mean_momentum)):
        u = x - c
        profile = _profile_1d(u, w, spec.profile)
        edge = _profile_1d(np.array([-grid.lengths[axis] / 2 - c, grid.lengths[axis] / 2 - c]), w, spec.profile)
        peak_density = 1.0 / np.sqrt(2 * np.pi * w * w)
        if np.max(edge) * np.sqrt(peak_density) >= TAIL_GUARD:
            raise DomainError(f"packet tail exceeds {TAIL_GUARD} at the domain boundary on axis {axis}")
        shape = [1] * grid.dim
        shape[axis] = -1
        amps = amps * (profile * np.exp(1j * p * u)).reshape(shape)

    internal = np.asarray(spec.internal, dtype=complex)
    internal = internal / np.linalg.norm(internal)
    amps = internal.reshape((-1,) + (1,) * grid.dim) * amps[np.newaxis] * np.exp(1j * spec.phase)
    return WaveFunction(grid, amps).normalized()


def bump_packet(grid: Grid, spec: PacketSpec) -> WaveFunction:
    """Same as :func:`gaussian_packet` with the compact profile forced."""
    from dataclasses import replace

    return gaussian_packet(grid, replace(spec, profile="bump"))


def random_band_limited_states(grid: Grid, count: int = 16, seed: int = 0, band: float = 0.25,
                               internal_dim: int = 1) -> list:
    """Seeded pseudo-random normalized states with support on ``|k| < band * k_max``."""
    rng = np.random.default_rng(seed)
    kmax = [np.pi / d for d in grid.spacing]
    mask = np.ones(grid.shape, dtype=bool)
    for k, km in zip(grid.kmesh(), kmax):
        mask &= np.abs(k) < band * km
    states = []
    shape = (internal_dim,) + grid.shape
    for _ in range(count):
        coeffs = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * mask
        psi_k = WaveFunction(grid, coeffs, MOMENTUM)
        states.append(position_transform(psi_k).normalized())
    return states

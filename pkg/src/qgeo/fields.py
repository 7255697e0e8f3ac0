"""Abelian gauge backgrounds, gauge functions and space-time curves.

Sign conventions (hbar = c = 1):

* ``A`` is the spatial vector potential, ``A0`` the scalar potential.
* Gauge transformations act as ``psi -> exp(i q L) psi``, ``A -> A + grad L``,
  ``A0 -> A0 - dL/dt``.
* ``line_phase(curve)`` is ``q * integral (A . dx - A0 dt)`` along the curve,
  so the parallel transporter of a charge ``q`` is ``exp(i * line_phase)``
  and a counter-clockwise loop around a flux string gives ``q * flux``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import erf

from .errors import ContractError, SingularityError

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


# --------------------------------------------------------------------------
# curves


@dataclass(frozen=True, eq=False)
class Curve:
    """Piecewise-linear path through space-time.

    ``vertices`` has shape ``(n, 1 + dim)``; column 0 is time.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 2:
            raise ContractError(f"curve needs >= 2 space-time vertices, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ContractError("curve vertices must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def spatial(cls, points, t: float = 0.0) -> "Curve":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] == 1:
            pts = pts.T
        return cls(np.column_stack([np.full(len(pts), t), pts]))

    @classmethod
    def temporal(cls, x, t0: float, t1: float) -> "Curve":
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return cls(np.array([[t0, *x], [t1, *x]]))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1] - 1

    @property
    def start(self) -> np.ndarray:
        return self.vertices[0]

    @property
    def end(self) -> np.ndarray:
        return self.vertices[-1]

    @property
    def displacement(self) -> np.ndarray:
        """``l^mu = end - start`` (time first)."""
        return self.end - self.start

    @property
    def is_closed(self) -> bool:
        return bool(np.allclose(self.start, self.end, rtol=0, atol=1e-12))

    def segments(self):
        return list(zip(self.vertices[:-1], self.vertices[1:]))

    def reversed(self) -> "Curve":
        return Curve(self.vertices[::-1])

    def then(self, other: "Curve") -> "Curve":
        """Concatenate ``self`` followed by ``other`` (shared junction vertex)."""
        if not np.allclose(self.end, other.start, rtol=0, atol=1e-12):
            raise ContractError("curves do not join")
        return Curve(np.vstack([self.vertices, other.vertices[1:]]))

    def shifted(self, dx) -> "Curve":
        shift = np.concatenate([[0.0], np.broadcast_to(np.asarray(dx, dtype=float), (self.dim,))])
        return Curve(self.vertices + shift)

    def repeated(self, times: int) -> "Curve":
        if not self.is_closed:
            raise ContractError("only closed curves can be repeated")
        if times == 0:
            return Curve(self.vertices[:1].repeat(2, axis=0))
        base = self if times > 0 else self.reversed()
        out = base
        for _ in range(abs(times) - 1):
            out = out.then(base)
        return out


def segment_kind(start, end) -> str:
    """``'spatial'``, ``'temporal'``, ``'mixed'`` or ``'null'`` for a space-time segment."""
    d = np.asarray(end) - np.asarray(start)
    moves_t = abs(d[0]) > 0
    moves_x = bool(np.any(d[1:] != 0))
    if moves_t and moves_x:
        return "mixed"
    if moves_t:
        return "temporal"
    if moves_x:
        return "spatial"
    return "null"


def circle(center, radius, winding=1, vertices=256, t=0.0, start_angle=0.0) -> Curve:
    """Closed polygonal loop; positive winding is counter-clockwise."""
    n = vertices * max(abs(winding), 1)
    angles = start_angle + np.linspace(0, 2 * np.pi * winding, n + 1)
    pts = np.column_stack([center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles)])
    pts[-1] = pts[0]
    return Curve.spatial(pts, t)


def _point_segment_distance(p, a, b):
    """Distance from points ``p`` (..., d) to segments ``a -> b`` (..., d)."""
    ab = b - a
    denom = np.sum(ab * ab, axis=-1)
    s = np.where(denom > 0, np.sum((p - a) * ab, axis=-1) / np.where(denom > 0, denom, 1), 0.0)
    s = np.clip(s, 0, 1)
    closest = a + s[..., None] * ab
    return np.linalg.norm(p - closest, axis=-1)


# --------------------------------------------------------------------------
# smooth profiles

def _smooth_step(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    out[s >= 1] = 1.0
    mid = (s > 0) & (s < 1)
    a = np.exp(-1.0 / s[mid])
    b = np.exp(-1.0 / (1.0 - s[mid]))
    out[mid] = a / (a + b)
    return out


def _smooth_step_derivative(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    mid = (s > 0) & (s < 1)
    sm = s[mid]
    a = np.exp(-1.0 / sm)
    b = np.exp(-1.0 / (1.0 - sm))
    da = a / sm**2
    db = -b / (1.0 - sm) ** 2
    out[mid] = (da * (a + b) - a * (da + db)) / (a + b) ** 2
    return out


def _erf_antiderivative(z):
    return z * erf(z) + np.exp(-z * z) / np.sqrt(np.pi)


def _window(x, lo, hi, width):
    """Smooth indicator of ``[lo, hi]`` with erf edges of the given width."""
    return 0.5 * (erf((x - lo) / width) - erf((x - hi) / width))


def _window_integral(x, lo, hi, width):
    """Integral of :func:`_window` from -inf to ``x``."""
    return 0.5 * width * (_erf_antiderivative((x - lo) / width) - _erf_antiderivative((x - hi) / width)) + 0.5 * (hi - lo)


# --------------------------------------------------------------------------
# Abelian fields


class AbelianField:
    """Base class: generic quadrature for line and time integrals.

    Subclasses implement :meth:`potential` and may override the integral
    methods with closed forms.
    """

    kind = "abstract"
    dim: int | None = None
    static = True

    def potential(self, x, t=0.0):
        raise NotImplementedError

    @property
    def gauge_id(self) -> str:
        return self.kind

    def check_segments(self, starts, ends, clearance=0.0):
        """Raise :class:`SingularityError` if a segment passes a singular point."""

    def singular_mask(self, starts, ends, clearance=0.0):
        """True where a segment comes closer than ``clearance`` to a singular point."""
        return np.zeros(np.broadcast_shapes(np.shape(starts), np.shape(ends))[:-1], dtype=bool)

    def _check_dim(self, x):
        x = np.asarray(x, dtype=float)
        if self.dim is not None and x.shape[-1] != self.dim:
            raise ContractError(f"{self.kind} field is {self.dim}D, got points of dimension {x.shape[-1]}")
        return x

    def segment_phase(self, starts, ends, t=0.0, q=1.0):
        """``q * int A . dx`` along straight spatial segments at fixed time (vectorised)."""
        starts = self._check_dim(starts)
        ends = self._check_dim(ends)
        self.check_segments(starts, ends)
        delta = ends - starts
        total = np.zeros(np.broadcast_shapes(starts.shape, ends.shape)[:-1])
        for node, weight in zip(GL_NODES, GL_WEIGHTS):
            s = 0.5 * (node + 1)
            A, _ = self.potential(starts + s * delta, t)
            total = total + 0.5 * weight * np.sum(A * delta, axis=-1)
        return q * total

    def time_phase(self, x, t0, t1, q=1.0, panels=64):
        """``q * int_t0^t1 A0(x, t) dt`` at fixed points (vectorised over ``x``)."""
        x = self._check_dim(x)
        if self.static:
            _, A0 = self.potential(x, t0)
            return q * A0 * (t1 - t0)
        edges = np.linspace(t0, t1, panels + 1)
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            for node, weight in zip(GL_NODES, GL_WEIGHTS):
                _, A0 = self.potential(x, 0.5 * (a + b) + 0.5 * (b - a) * node)
                total = total + 0.5 * (b - a) * weight * A0
        return q * np.asarray(total)

    def _mixed_phase(self, start, end, q):
        delta = end - start
        total = 0.0
        for node, weight in zip(GL_NODES, GL_WEIGHTS):
            y = start + 0.5 * (node + 1) * delta
            A, A0 = self.potential(y[1:], y[0])
            total += 0.5 * weight * (np.dot(A, delta[1:]) - A0 * delta[0])
        return q * float(total)

    def line_phase(self, curve: Curve, q=1.0) -> float:
        """``q * int (A . dx - A0 dt)`` along ``curve``; additive and odd under reversal."""
        total = 0.0
        for a, b in curve.segments():
            kind = segment_kind(a, b)
            if kind == "spatial":
                total += float(self.segment_phase(a[1:][None], b[1:][None], a[0], q)[0])
            elif kind == "temporal":
                total -= float(np.asarray(self.time_phase(a[1:][None], a[0], b[0], q)).reshape(-1)[0])
            elif kind == "mixed":
                total += self._mixed_phase(a, b, q)
        return total

    def field_strength(self, x, t=0.0, h=1e-5):
        """``F_0x = -dA0/dx - dA/dt`` by central differences (1D diagnostic)."""
        x = np.asarray(x, dtype=float)
        _, p_plus = self.potential(x + h, t)
        _, p_minus = self.potential(x - h, t)
        a_plus, _ = self.potential(x, t + h)
        a_minus, _ = self.potential(x, t - h)
        return -(p_plus - p_minus) / (2 * h) - (a_plus[..., 0] - a_minus[..., 0]) / (2 * h)


@dataclass(frozen=True)
class ZeroField(AbelianField):
    dim: int | None = None
    kind = "zero"

    def potential(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        return np.zeros_like(x), np.zeros(x.shape[:-1])

    def segment_phase(self, starts, ends, t=0.0, q=1.0):
        return np.zeros(np.broadcast_shapes(np.shape(starts), np.shape(ends))[:-1])

    def time_phase(self, x, t0, t1, q=1.0, panels=64):
        return np.zeros(np.shape(x)[:-1])

    def to_dict(self):
        return {"variant": "zero"}


@dataclass(frozen=True)
class UniformField(AbelianField):
    vector: tuple = (0.0,)
    scalar: float = 0.0
    kind = "uniform"

    def __post_init__(self):
        object.__setattr__(self, "vector", tuple(float(v) for v in np.atleast_1d(self.vector)))

    @property
    def dim(self):
        return len(self.vector)

    def potential(self, x, t=0.0):
        x = self._check_dim(x)
        A = np.broadcast_to(np.asarray(self.vector), x.shape).copy()
        return A, np.full(x.shape[:-1], self.scalar)

    def segment_phase(self, starts, ends, t=0.0, q=1.0):
        delta = self._check_dim(ends) - self._check_dim(starts)
        return q * delta @ np.asarray(self.vector)

    def time_phase(self, x, t0, t1, q=1.0, panels=64):
        return np.full(np.shape(x)[:-1], q * self.scalar * (t1 - t0))

    def to_dict(self):
        return {"variant": "uniform", "vector": list(self.vector), "scalar": self.scalar}


@dataclass(frozen=True)
class FluxString(AbelianField):
    """Infinitely thin flux line through ``center`` in the plane.

    ``gauge='azimuthal'`` uses ``A = flux/(2 pi r) e_phi``.  ``gauge='strip'``
    concentrates the potential in a smooth half-strip of half-width
    ``half_width`` running from the string along ``direction``; it is the
    azimuthal potential minus the gradient of a single-valued smoothed angle,
    so the two differ by a gauge transformation outside the string core
    (radius ``1.5 * half_width``).
    """

    center: tuple = (0.0, 0.0)
    flux: float = 2 * np.pi
    gauge: str = "azimuthal"
    direction: tuple = (-1.0, 0.0)
    half_width: float = 0.5
    dim = 2
    kind = "flux_string"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        d = np.asarray(self.direction, dtype=float)
        object.__setattr__(self, "direction", tuple(d / np.linalg.norm(d)))
        if self.gauge not in ("azimuthal", "strip"):
            raise ContractError(f"unknown flux-string gauge {self.gauge!r}")
        if self.gauge == "strip" and self.half_width <= 0:
            raise ContractError("strip half-width must be positive")

    @property
    def gauge_id(self):
        return f"flux_string/{self.gauge}"

    @property
    def core_radius(self) -> float:
        return 1.5 * self.half_width if self.gauge == "strip" else 1e-9

    def _frame(self):
        e1 = -np.asarray(self.direction)
        e2 = np.array([-e1[1], e1[0]])
        return e1, e2

    def _local(self, x):
        r = np.asarray(x, dtype=float) - np.asarray(self.center)
        e1, e2 = self._frame()
        return r @ e1, r @ e2

    def smoothed_angle(self, x):
        """Single-valued angle whose gradient is ``2 pi / flux`` times (A_azimuthal - A_strip)."""
        u, v = self._local(x)
        w = self.half_width
        theta = np.arctan2(v, u)
        below = np.signbit(v).astype(float)
        sigma = 1.0 - _smooth_step((v + w) / (2 * w))
        h = _smooth_step(-u / w)
        return theta + 2 * np.pi * h * (below - sigma)

    def gauge_to_azimuthal(self):
        """Gauge function ``L`` with ``A_azimuthal = A_strip + grad L``."""
        return AngleGauge(self)

    def potential(self, x, t=0.0):
        x = self._check_dim(x)
        r = x - np.asarray(self.center)
        if self.gauge == "azimuthal":
            r2 = np.sum(r * r, axis=-1)
            if np.any(r2 < 1e-24):
                raise SingularityError("vector potential evaluated at the flux-string center")
            A = self.flux / (2 * np.pi) * np.stack([-r[..., 1], r[..., 0]], axis=-1) / r2[..., None]
        else:
            # bounded: the 1/r part cancels against the gradient of the smoothed angle
            u, v = self._local(x)
            w = self.half_width
            e1, e2 = self._frame()
            below = np.signbit(v).astype(float)
            sigma = 1.0 - _smooth_step((v + w) / (2 * w))
            dsigma = -_smooth_step_derivative((v + w) / (2 * w)) / (2 * w)
            h = _smooth_step(-u / w)
            dh = -_smooth_step_derivative(-u / w) / w
            A = -self.flux * ((dh * (below - sigma))[..., None] * e1 - (h * dsigma)[..., None] * e2)
        return A, np.zeros(x.shape[:-1])

    def singular_mask(self, starts, ends, clearance=0.0):
        dist = _point_segment_distance(np.asarray(self.center), np.asarray(starts, float), np.asarray(ends, float))
        return dist < max(self.core_radius, clearance)

    def check_segments(self, starts, ends, clearance=0.0):
        dist = _point_segment_distance(np.asarray(self.center), np.asarray(starts), np.asarray(ends))
        limit = max(self.core_radius, clearance)
        if np.any(dist < limit):
            raise SingularityError(
                f"segment passes within {float(np.min(dist)):.3g} of the flux string (limit {limit:.3g})")

    def segment_phase(self, starts, ends, t=0.0, q=1.0):
        starts = self._check_dim(starts)
        ends = self._check_dim(ends)
        self.check_segments(starts, ends)
        c = np.asarray(self.center)
        r1, r2 = starts - c, ends - c
        cross = r1[..., 0] * r2[..., 1] - r1[..., 1] * r2[..., 0]
        dot = np.sum(r1 * r2, axis=-1)
        subtended = np.arctan2(cross, dot)
        if self.gauge == "strip":
            subtended = subtended - (self.smoothed_angle(ends) - self.smoothed_angle(starts))
        return q * self.flux / (2 * np.pi) * subtended

    def time_phase(self, x, t0, t1, q=1.0, panels=64):
        return np.zeros(np.shape(x)[:-1])

    def to_dict(self):
        out = {"variant": "flux_string", "center": list(self.center), "flux": self.flux, "gauge": self.gauge}
        if self.gauge == "strip":
            out.update(direction=list(self.direction), half_width=self.half_width)
        return out


@dataclass(frozen=True)
class CapacitorPulse(AbelianField):
    """Electric field ``E0`` switched on in ``interval`` x ``[t_on, t_off]`` (1D).

    Edges are erf-smoothed with width ``smoothing``.  ``gauge='scalar'`` carries
    the field in ``A0`` only; ``gauge='strip'`` carries it in ``A`` only, which
    after the pulse is a static strip over ``interval``.
    """

    interval: tuple = (-1.0, 1.0)
    field_strength_value: float = 1.0
    t_on: float = 0.0
    t_off: float = 1.0
    smoothing: float = 0.1
    gauge: str = "scalar"
    dim = 1
    static = False
    kind = "capacitor_pulse"

    def __post_init__(self):
        object.__setattr__(self, "interval", tuple(float(v) for v in self.interval))
        if self.gauge not in ("scalar", "strip"):
            raise ContractError(f"unknown capacitor gauge {self.gauge!r}")
        if self.interval[1] <= self.interval[0] or self.t_off <= self.t_on or self.smoothing <= 0:
            raise ContractError("capacitor pulse needs a positive interval, duration and smoothing")

    @property
    def gauge_id(self):
        return f"capacitor_pulse/{self.gauge}"

    @property
    def width(self) -> float:
        return self.interval[1] - self.interval[0]

    @property
    def total_flux(self) -> float:
        """``int F_0x dx dt`` over all space-time (exact for erf edges)."""
        return self.field_strength_value * self.width * (self.t_off - self.t_on)

    def _sx(self, x):
        return _window(x, *self.interval, self.smoothing)

    def _Sx(self, x):
        return _window_integral(x, *self.interval, self.smoothing) - 0.5 * self.width

    def _st(self, t):
        return _window(t, self.t_on, self.t_off, self.smoothing)

    def _St(self, t):
        return _window_integral(t, self.t_on, self.t_off, self.smoothing)

    def electric_field(self, x, t):
        x = np.asarray(x, dtype=float)[..., 0]
        return self.field_strength_value * self._sx(x) * self._st(t)

    def potential(self, x, t=0.0):
        x = self._check_dim(x)
        xs = x[..., 0]
        E0 = self.field_strength_value
        if self.gauge == "scalar":
            return np.zeros_like(x), -E0 * self._Sx(xs) * self._st(t)
        return (-E0 * self._sx(xs) * self._St(t))[..., None], np.zeros(xs.shape)

    def segment_phase(self, starts, ends, t=0.0, q=1.0):
        starts = self._check_dim(starts)[..., 0]
        ends = self._check_dim(ends)[..., 0]
        if self.gauge == "scalar":
            return np.zeros(np.broadcast_shapes(starts.shape, ends.shape))
        return -q * self.field_strength_value * self._St(t) * (self._Sx(ends) - self._Sx(starts))

    def time_phase(self, x, t0, t1, q=1.0, panels=64):
        xs = self._check_dim(x)[..., 0]
        if self.gauge == "strip":
            return np.zeros(xs.shape)
        return -q * self.field_strength_value * self._Sx(xs) * (self._St(t1) - self._St(t0))

    def to_dict(self):
        return {"variant": "capacitor_pulse", "interval": list(self.interval), "E0": self.field_strength_value,
                "t_on": self.t_on, "t_off": self.t_off, "smoothing": self.smoothing, "gauge": self.gauge}


@dataclass(frozen=True, eq=False)
class SampledField(AbelianField):
    """Static potentials tabulated on a periodic grid (linear interpolation)."""

    grid: object = None
    vector_table: np.ndarray = None
    scalar_table: np.ndarray = None
    kind = "sampled"

    def __post_init__(self):
        g = self.grid
        vec = np.zeros((g.dim,) + g.shape) if self.vector_table is None else np.asarray(self.vector_table, float)
        sca = np.zeros(g.shape) if self.scalar_table is None else np.asarray(self.scalar_table, float)
        if vec.shape != (g.dim,) + g.shape or sca.shape != g.shape:
            raise ContractError("sampled tables do not match the grid")
        object.__setattr__(self, "vector_table", vec)
        object.__setattr__(self, "scalar_table", sca)

    @property
    def dim(self):
        return self.grid.dim

    def _interp(self, table, x):
        from scipy.ndimage import map_coordinates

        x = np.asarray(x, dtype=float)
        coords = [(x[..., a] + L / 2) / d for a, (L, d) in enumerate(zip(self.grid.lengths, self.grid.spacing))]
        flat = [c.reshape(-1) for c in coords]
        out = map_coordinates(table, flat, order=1, mode="grid-wrap")
        return out.reshape(x.shape[:-1])

    def potential(self, x, t=0.0):
        x = self._check_dim(x)
        A = np.stack([self._interp(self.vector_table[a], x) for a in range(self.dim)], axis=-1)
        return A, self._interp(self.scalar_table, x)

    def segment_phase(self, starts, ends, t=0.0, q=1.0):
        starts = self._check_dim(starts)
        ends = self._check_dim(ends)
        delta = ends - starts
        length = float(np.max(np.linalg.norm(delta, axis=-1), initial=0.0))
        n = max(2, int(np.ceil(4 * length / min(self.grid.spacing))) + 1)
        s = np.linspace(0, 1, n)
        samples = []
        for si in s:
            A, _ = self.potential(starts + si * delta, t)
            samples.append(np.sum(A * delta, axis=-1))
        return q * trapezoid(np.stack(samples), s, axis=0)

    def to_dict(self):
        return {"variant": "sampled", "points": list(self.grid.points), "lengths": list(self.grid.lengths),
                "vector": self.vector_table.tolist(), "scalar": self.scalar_table.tolist()}


# --------------------------------------------------------------------------
# gauge functions


@dataclass(frozen=True)
class GaugeFunction:
    """``L(x, t) = sum_j a_j cos(k_j . x - w_j t + phi_j)`` with periodic ``k_j``.

    ``modes`` holds integer mode numbers; ``k_j = 2 pi modes_j / lengths``, so
    ``L`` is single-valued on the periodic domain.
    """

    lengths: tuple
    amplitudes: tuple = ()
    modes: tuple = ()
    frequencies: tuple = ()
    phases: tuple = ()

    def __post_init__(self):
        lengths = tuple(float(v) for v in np.atleast_1d(self.lengths))
        n = len(self.amplitudes)
        modes = np.asarray(self.modes, dtype=float).reshape(n, len(lengths)) if n else np.zeros((0, len(lengths)))
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        object.__setattr__(self, "modes", tuple(map(tuple, modes.tolist())))
        object.__setattr__(self, "frequencies", tuple(float(w) for w in (self.frequencies or [0.0] * n)))
        object.__setattr__(self, "phases", tuple(float(p) for p in (self.phases or [0.0] * n)))

    @classmethod
    def random(cls, lengths, n_terms=4, seed=0, max_mode=3, amplitude=1.0, time_dependent=False):
        rng = np.random.default_rng(seed)
        lengths = tuple(np.atleast_1d(lengths))
        modes = rng.integers(-max_mode, max_mode + 1, size=(n_terms, len(lengths)))
        amps = amplitude * rng.uniform(0.2, 1.0, n_terms)
        freqs = rng.uniform(-1.0, 1.0, n_terms) if time_dependent else np.zeros(n_terms)
        phases = rng.uniform(0, 2 * np.pi, n_terms)
        return cls(lengths, tuple(amps), tuple(map(tuple, modes)), tuple(freqs), tuple(phases))

    @property
    def wavevectors(self) -> np.ndarray:
        return 2 * np.pi * np.asarray(self.modes).reshape(-1, len(self.lengths)) / np.asarray(self.lengths)

    def _arg(self, x, t):
        x = np.asarray(x, dtype=float)
        return x @ self.wavevectors.T - np.asarray(self.frequencies) * np.asarray(t)[..., None] + np.asarray(self.phases)

    def value(self, x, t=0.0):
        if not self.amplitudes:
            return np.zeros(np.shape(x)[:-1])
        return np.cos(self._arg(x, t)) @ np.asarray(self.amplitudes)

    def gradient(self, x, t=0.0):
        if not self.amplitudes:
            return np.zeros(np.shape(x))
        s = -np.sin(self._arg(x, t)) * np.asarray(self.amplitudes)
        return s @ self.wavevectors

    def time_derivative(self, x, t=0.0):
        if not self.amplitudes:
            return np.zeros(np.shape(x)[:-1])
        s = np.sin(self._arg(x, t)) * np.asarray(self.amplitudes)
        return s @ np.asarray(self.frequencies)


@dataclass(frozen=True, eq=False)
class AngleGauge:
    """``L = flux/(2 pi) * smoothed_angle``: maps the strip gauge to the azimuthal gauge."""

    string: FluxString

    def value(self, x, t=0.0):
        return self.string.flux / (2 * np.pi) * self.string.smoothed_angle(x)

    def gradient(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        az, _ = FluxString(self.string.center, self.string.flux).potential(x)
        strip, _ = FluxString(self.string.center, self.string.flux, "strip", self.string.direction,
                              self.string.half_width).potential(x)
        return az - strip

    def time_derivative(self, x, t=0.0):
        return np.zeros(np.shape(x)[:-1])


@dataclass(frozen=True, eq=False)
class GaugeTransformedField(AbelianField):
    """``A + grad L``, ``A0 - dL/dt`` with exact boundary terms in the integrals."""

    base: AbelianField
    gauge: object
    kind = "gauge_transformed"

    @property
    def dim(self):
        return self.base.dim

    @property
    def static(self):
        return self.base.static and not any(getattr(self.gauge, "frequencies", ()) or ())

    @property
    def gauge_id(self):
        return f"{self.base.gauge_id}+gauge"

    def check_segments(self, starts, ends, clearance=0.0):
        self.base.check_segments(starts, ends, clearance)

    def singular_mask(self, starts, ends, clearance=0.0):
        return self.base.singular_mask(starts, ends, clearance)

    def potential(self, x, t=0.0):
        A, A0 = self.base.potential(x, t)
        return A + self.gauge.gradient(x, t), A0 - self.gauge.time_derivative(x, t)

    def segment_phase(self, starts, ends, t=0.0, q=1.0):
        base = self.base.segment_phase(starts, ends, t, q)
        return base + q * (self.gauge.value(ends, t) - self.gauge.value(starts, t))

    def time_phase(self, x, t0, t1, q=1.0, panels=64):
        base = self.base.time_phase(x, t0, t1, q, panels)
        return base - q * (self.gauge.value(x, t1) - self.gauge.value(x, t0))


def evaluate_potential(config: AbelianField, x, t=0.0):
    """``(A, A0)`` at the points ``x`` (shape ``(..., dim)``)."""
    return config.potential(np.asarray(x, dtype=float), t)


def line_phase(config: AbelianField, curve: Curve, q=1.0) -> float:
    return config.line_phase(curve, q)


def gauge_transform(config: AbelianField, gauge) -> GaugeTransformedField:
    return GaugeTransformedField(config, gauge)


def gauge_transform_state(psi, gauge, q=1.0, t=0.0):
    """``psi -> exp(i q L(x, t)) psi``."""
    u = np.exp(1j * q * gauge.value(psi.grid.positions(), t))
    return psi.replace(psi.amplitudes * u[np.newaxis])


def abelian_holonomy(config: AbelianField, loop: Curve, q=1.0) -> complex:
    if not loop.is_closed:
        raise ContractError("holonomy needs a closed curve")
    return complex(np.exp(1j * config.line_phase(loop, q)))


# --------------------------------------------------------------------------
# serialization

def field_from_dict(tree: dict) -> AbelianField:
    variant = tree.get("variant")
    if variant == "zero":
        return ZeroField()
    if variant == "uniform":
        return UniformField(tuple(tree.get("vector", [0.0])), float(tree.get("scalar", 0.0)))
    if variant == "flux_string":
        return FluxString(tuple(tree.get("center", (0.0, 0.0))), float(tree["flux"]), tree.get("gauge", "azimuthal"),
                          tuple(tree.get("direction", (-1.0, 0.0))), float(tree.get("half_width", 0.5)))
    if variant == "capacitor_pulse":
        return CapacitorPulse(tuple(tree["interval"]), float(tree["E0"]), float(tree["t_on"]), float(tree["t_off"]),
                              float(tree.get("smoothing", 0.1)), tree.get("gauge", "scalar"))
    if variant == "sampled":
        from .grid import Grid

        grid = Grid(tuple(tree["points"]), tuple(tree["lengths"]))
        return SampledField(grid, np.asarray(tree["vector"]), np.asarray(tree["scalar"]))
    raise ContractError(f"unknown field variant {variant!r}")


def field_to_dict(config: AbelianField) -> dict:
    return config.to_dict()

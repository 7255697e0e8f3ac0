"""Matrix-valued gauge fields and path-ordered exponentials.

Generators ``T_k`` are Hermitian.  Along a space-time step ``dy = (dt, dx)``
the transporter is ``exp(i g0 (A^k . dx - A0^k dt) T_k)``; for ``d = 1`` and
``T = 1`` this is the Abelian ``exp(i * line_phase)``.  Gauge transformations
use ``u(x, t) = exp(i g0 L^k(x, t) T_k)`` and send

    A  -> u A u^+ - (i/g0) (grad u) u^+
    A0 -> u A0 u^+ + (i/g0) (d_t u) u^+

so that ``W(curve) -> u(end) W u(start)^+``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, StepSizeError
from .fields import AbelianField, Curve, ZeroField, field_from_dict, segment_kind

UNITARY_ATOL = 1e-10
MIN_STEPS = 16


def su2_generators() -> np.ndarray:
    """Pauli matrices over two, shape ``(3, 2, 2)``."""
    return 0.5 * np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def expi_hermitian(h: np.ndarray) -> np.ndarray:
    """``exp(i h)`` for a stack of Hermitian matrices (..., d, d)."""
    if h.shape[-1] == 1:
        return np.exp(1j * h)
    if h.shape[-1] == 2:
        return _expi_2x2(h)[0]
    lam, vec = np.linalg.eigh(h)
    return (vec * np.exp(1j * lam)[..., None, :]) @ np.conj(np.swapaxes(vec, -1, -2))


def expi_hermitian_derivative(h: np.ndarray, e: np.ndarray):
    """``(exp(i h), D exp(i h)[i e])`` for Hermitian stacks ``h`` and directions ``e``.

    Uses the Daleckii-Krein divided-difference formula in the eigenbasis of ``h``
    (closed form for 2 x 2).
    """
    if h.shape[-1] == 2:
        return _expi_2x2(h, e)
    lam, vec = np.linalg.eigh(h)
    vh = np.conj(np.swapaxes(vec, -1, -2))
    li, lj = lam[..., :, None], lam[..., None, :]
    gamma = 1j * np.exp(0.5j * (li + lj)) * np.sinc((li - lj) / (2 * np.pi))
    u = (vec * np.exp(1j * lam)[..., None, :]) @ vh
    du = vec @ ((vh @ e @ vec) * gamma) @ vh
    return u, du


def _traceless_2x2(h):
    m = 0.5 * (h[..., 0, 0] + h[..., 1, 1]).real
    H = h - m[..., None, None] * np.eye(2)
    return m, H


def _expi_2x2(h, e=None):
    """``exp(i h) = exp(i m) (cos r + i sin(r)/r H)`` with ``h = m + H``, ``H^2 = r^2``; optional derivative along ``e``."""
    m, H = _traceless_2x2(h)
    r = np.sqrt(np.maximum(np.sum(np.abs(H[..., 0, :]) ** 2, axis=-1).real, 0.0))
    c = np.cos(r)
    s = np.sinc(r / np.pi)
    phase = np.exp(1j * m)[..., None, None]
    core = c[..., None, None] * np.eye(2) + 1j * s[..., None, None] * H
    u = phase * core
    if e is None:
        return u, None
    em, E = _traceless_2x2(e)
    t = 0.5 * np.einsum("...ij,...ji->...", H, E).real
    small = r < 1e-3
    rs = np.where(small, 1.0, r)
    ds = np.where(small, -1.0 / 3 + r * r / 30, (c - s) / (rs * rs))
    dcore = (-s * t)[..., None, None] * np.eye(2) + 1j * (ds * t)[..., None, None] * H + 1j * s[..., None, None] * E
    return u, 1j * em[..., None, None] * u + phase * dcore


def _dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


class MatrixField:
    """Interface: ``connection(x, t) -> (A (..., dim, d, d), A0 (..., d, d))``."""

    matrix_dim = 1
    dim = None

    def connection(self, x, t=0.0):
        raise NotImplementedError

    def check_segments(self, starts, ends):
        pass

    def singular_mask(self, starts, ends, clearance=0.0):
        return np.zeros(np.broadcast_shapes(np.shape(starts), np.shape(ends))[:-1], dtype=bool)


@dataclass(frozen=True, eq=False)
class NonAbelianField(MatrixField):
    """``A_mu = A_mu^k T_k`` with each ``A^k`` drawn from the Abelian library."""

    generators: np.ndarray
    coupling: float
    components: tuple

    def __post_init__(self):
        gens = np.asarray(self.generators, dtype=complex)
        if gens.ndim != 3 or gens.shape[1] != gens.shape[2]:
            raise ContractError("generators must have shape (K, d, d)")
        if not np.allclose(gens, _dagger(gens), atol=1e-12):
            raise ContractError("generators must be Hermitian")
        if np.linalg.matrix_rank(gens.reshape(len(gens), -1)) < len(gens):
            raise ContractError("generators must be linearly independent")
        if len(self.components) != len(gens):
            raise ContractError("need one component field per generator")
        gens.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def matrix_dim(self) -> int:
        return self.generators.shape[1]

    @property
    def dim(self):
        dims = {c.dim for c in self.components if c.dim is not None}
        if len(dims) > 1:
            raise ContractError("component fields disagree on dimension")
        return dims.pop() if dims else None

    def connection(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        A = 0
        A0 = 0
        for comp, gen in zip(self.components, self.generators):
            a, a0 = comp.potential(x, t)
            A = A + a[..., None, None] * gen
            A0 = A0 + np.asarray(a0)[..., None, None] * gen
        return A, A0

    def check_segments(self, starts, ends):
        for comp in self.components:
            comp.check_segments(starts, ends)

    def singular_mask(self, starts, ends, clearance=0.0):
        return np.any([c.singular_mask(starts, ends, clearance) for c in self.components], axis=0)

    def to_dict(self):
        return {"variant": "non_abelian", "coupling": self.coupling,
                "generators": {"re": self.generators.real.tolist(), "im": self.generators.imag.tolist()},
                "components": [c.to_dict() for c in self.components]}


def non_abelian_from_dict(tree: dict) -> NonAbelianField:
    gens = tree.get("generators", "su2")
    if gens == "su2":
        gens = su2_generators()
    else:
        gens = np.asarray(gens["re"]) + 1j * np.asarray(gens["im"])
    return NonAbelianField(gens, float(tree["coupling"]), tuple(field_from_dict(c) for c in tree["components"]))


def embed_abelian(config: AbelianField, q: float = 1.0) -> NonAbelianField:
    """View an Abelian field with charge ``q`` as a 1x1 matrix field."""
    return NonAbelianField(np.ones((1, 1, 1), dtype=complex), q, (config,))


def zero_non_abelian(dim: int = 1, generators=None, coupling: float = 1.0) -> NonAbelianField:
    gens = su2_generators() if generators is None else generators
    return NonAbelianField(gens, coupling, tuple(ZeroField(dim) for _ in gens))


@dataclass(frozen=True, eq=False)
class MatrixGauge:
    """``u(x, t) = exp(i g0 L^k(x, t) T_k)`` built from scalar gauge functions."""

    generators: np.ndarray
    coupling: float
    functions: tuple

    def _h(self, x, t):
        return sum(np.asarray(f.value(x, t))[..., None, None] * g for f, g in zip(self.functions, self.generators))

    def unitary(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        return expi_hermitian(self.coupling * self._h(x, t))

    def derivatives(self, x, t=0.0):
        """``(u, [d_j u for each axis], d_t u)``."""
        x = np.asarray(x, dtype=float)
        h = self.coupling * self._h(x, t)
        grads = []
        for axis in range(x.shape[-1]):
            e = sum(np.asarray(f.gradient(x, t))[..., axis, None, None] * g
                    for f, g in zip(self.functions, self.generators))
            u, du = expi_hermitian_derivative(h, self.coupling * e)
            grads.append(du)
        e_t = sum(np.asarray(f.time_derivative(x, t))[..., None, None] * g
                  for f, g in zip(self.functions, self.generators))
        u, dt_u = expi_hermitian_derivative(h, self.coupling * e_t)
        return u, grads, dt_u


@dataclass(frozen=True, eq=False)
class GaugeTransformedMatrixField(MatrixField):
    base: MatrixField
    gauge: MatrixGauge

    @property
    def coupling(self):
        return self.base.coupling

    @property
    def matrix_dim(self):
        return self.base.matrix_dim

    @property
    def dim(self):
        return self.base.dim

    def check_segments(self, starts, ends):
        self.base.check_segments(starts, ends)

    def singular_mask(self, starts, ends, clearance=0.0):
        return self.base.singular_mask(starts, ends, clearance)

    def connection(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        A, A0 = self.base.connection(x, t)
        u, grads, dt_u = self.gauge.derivatives(x, t)
        ud = _dagger(u)
        g0 = self.coupling
        A_new = np.stack([u @ A[..., j, :, :] @ ud - (1j / g0) * grads[j] @ ud for j in range(x.shape[-1])], axis=-3)
        A0_new = u @ A0 @ ud + (1j / g0) * dt_u @ ud
        return A_new, A0_new


def gauge_transform_matrix(config: MatrixField, gauge: MatrixGauge) -> GaugeTransformedMatrixField:
    return GaugeTransformedMatrixField(config, gauge)


def gauge_transform_spinor(psi, gauge: MatrixGauge, t=0.0):
    """``psi(x) -> u(x) psi(x)`` acting on the internal index."""
    u = gauge.unitary(psi.grid.positions(), t)
    amps = np.moveaxis(psi.amplitudes, 0, -1)
    out = np.einsum("...ij,...j->...i", u, amps)
    return psi.replace(np.moveaxis(out, -1, 0))


def ordered_product(mats: np.ndarray) -> np.ndarray:
    """``M_{n-1} ... M_1 M_0`` along axis -3 by pairwise reduction."""
    while mats.shape[-3] > 1:
        if mats.shape[-3] % 2:
            eye = np.broadcast_to(np.eye(mats.shape[-1], dtype=mats.dtype), mats.shape[:-3] + (1,) + mats.shape[-2:])
            mats = np.concatenate([mats, eye], axis=-3)
        mats = mats[..., 1::2, :, :] @ mats[..., 0::2, :, :]
    return mats[..., 0, :, :]


SCHEMES = ("midpoint", "magnus4")
_GL2 = (0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6)


def _step_generators(config: MatrixField, a, b, s, offsets):
    """Hermitian ``g0 (A . dx - A0 dt)`` per unit curve parameter at parameters ``s``."""
    delta = b - a
    y = a[None, :] + s[:, None] * delta[None, :]
    x = offsets[:, None, :] + y[None, :, 1:]
    t = y[:, 0]
    A, A0 = config.connection(x, t[None, :] if not np.all(t == t[0]) else t[0])
    gen = np.einsum("...jab,j->...ab", A, delta[1:]) - A0 * delta[0]
    return config.coupling * 0.5 * (gen + _dagger(gen))


def _segment_steps(config: MatrixField, a, b, steps, offsets, scheme="midpoint"):
    """Per-step exponentials for one segment, shape (n_offsets, steps, d, d)."""
    h = 1.0 / steps
    left = np.arange(steps) * h
    if scheme == "midpoint":
        return expi_hermitian(h * _step_generators(config, a, b, left + 0.5 * h, offsets))
    g1 = _step_generators(config, a, b, left + _GL2[0] * h, offsets)
    g2 = _step_generators(config, a, b, left + _GL2[1] * h, offsets)
    comm = g1 @ g2 - g2 @ g1
    return expi_hermitian(0.5 * h * (g1 + g2) - 1j * (np.sqrt(3) / 12) * h * h * comm)


def wilson_lines(config: MatrixField, curve: Curve, offsets=None, steps: int = 256, chunk: int = 4096,
                 scheme: str = "midpoint") -> np.ndarray:
    """Wilson lines of ``curve`` shifted by each spatial offset; shape (n, d, d)."""
    if steps < MIN_STEPS:
        raise ContractError(f"need at least {MIN_STEPS} steps per segment")
    if scheme not in SCHEMES:
        raise ContractError(f"unknown path-ordering scheme {scheme!r}")
    dim = curve.dim
    offsets = np.zeros((1, dim)) if offsets is None else np.asarray(offsets, dtype=float).reshape(-1, dim)
    d = config.matrix_dim
    out = np.empty((len(offsets), d, d), dtype=complex)
    segs = [(a, b) for a, b in curve.segments() if segment_kind(a, b) != "null"]
    for a, b in segs:
        config.check_segments(a[None, 1:] + offsets, b[None, 1:] + offsets)
    per = max(1, chunk // max(steps, 1))
    for lo in range(0, len(offsets), per):
        off = offsets[lo:lo + per]
        W = np.broadcast_to(np.eye(d, dtype=complex), (len(off), d, d)).copy()
        for a, b in segs:
            W = ordered_product(_segment_steps(config, a, b, steps, off, scheme)) @ W
        out[lo:lo + per] = W
    return out


def wilson_line(config: MatrixField, curve: Curve, steps: int = 256, check: bool = False,
                scheme: str = "midpoint") -> np.ndarray:
    """Path-ordered exponential along ``curve`` (later segments multiply on the left)."""
    W = wilson_lines(config, curve, None, steps, scheme=scheme)[0]
    if check:
        ratio = richardson_ratio(config, curve, steps, scheme)
        if ratio < 1.0:
            raise StepSizeError(f"Wilson line not converging (defect ratio {ratio:.3g})")
    return W


def richardson_ratio(config: MatrixField, curve: Curve, steps: int = 64, scheme: str = "midpoint") -> float:
    """``|W_n - W_2n| / |W_2n - W_4n|``: about 4 for midpoint, 16 for magnus4."""
    w1, w2, w4 = (wilson_lines(config, curve, None, k, scheme=scheme)[0] for k in (steps, 2 * steps, 4 * steps))
    d1 = np.linalg.norm(w1 - w2)
    d2 = np.linalg.norm(w2 - w4)
    if d2 == 0:
        return np.inf
    return float(d1 / d2)


def unitarity_defect(W: np.ndarray) -> float:
    eye = np.eye(W.shape[-1])
    return float(np.max(np.abs(_dagger(W) @ W - eye)))


def holonomy(config, loop: Curve, steps: int = 256, q: float = 1.0, scheme: str = "midpoint"):
    """Closed-loop transporter: complex phase for Abelian fields, matrix otherwise."""
    if not loop.is_closed:
        raise ContractError("holonomy needs a closed curve")
    if isinstance(config, AbelianField):
        return complex(np.exp(1j * config.line_phase(loop, q)))
    return wilson_line(config, loop, steps, scheme=scheme)

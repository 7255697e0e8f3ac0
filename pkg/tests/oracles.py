"""Independent reference computations used by the tests.

* ``dense_adjoint``: the grid Hamiltonian as a dense matrix, integrated with
  an adaptive high-order ODE solver backwards in time.
* ``quadrature_line_phase``: adaptive quadrature of ``q int A . dx`` along a
  straight segment, straight from the potential.
"""
import numpy as np
from scipy.integrate import quad, solve_ivp

from qgeo.dynamics import _axis_antiderivative


def dense_hamiltonian(spec, grid, t):
    """``G F^+ diag((k - q Abar)^2 / 2m) F G^+ + diag(q A0 + V)`` with ``G = diag(exp(i q chi))`` (1D)."""
    n = grid.points[0]
    F = np.fft.fft(np.eye(n), axis=0)
    Fi = np.fft.ifft(np.eye(n), axis=0)
    x = grid.positions()
    A, A0 = spec.field.potential(x, t)
    mean, chi = _axis_antiderivative(A[..., 0], grid, 0)
    k = grid.wavenumbers[0]
    q = spec.charge
    K = Fi @ np.diag((k - q * np.ravel(mean)[0]) ** 2 / (2 * spec.mass)) @ F
    G = np.diag(np.exp(1j * q * chi))
    return G @ K @ G.conj().T + np.diag(q * A0 + spec.potential(x))


def dense_evolve(psi, spec, t0, t1, rtol=1e-12, atol=1e-12):
    """``T exp(-i int_t0^t1 H dt) psi`` (or its adjoint when ``t1 < t0``) by DOP853."""
    grid = psi.grid
    sol = solve_ivp(lambda t, y: -1j * (dense_hamiltonian(spec, grid, t) @ y), (t0, t1),
                    np.asarray(psi.amplitudes[0], dtype=complex), method="DOP853", rtol=rtol, atol=atol)
    return sol.y[:, -1]


def dense_adjoint(psi, spec, t0, t1):
    """``U(t1, t0)^+ psi``: integrate from ``t1`` back to ``t0``."""
    return dense_evolve(psi, spec, t1, t0)


def quadrature_line_phase(field, a, b, t=0.0, q=1.0):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a

    def integrand(s):
        A, _ = field.potential((a + s * d)[None], t)
        return float(A[0] @ d)

    return q * quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=400)[0]


def quadrature_time_phase(field, x, t0, t1, q=1.0):
    x = np.atleast_1d(np.asarray(x, dtype=float))

    def integrand(t):
        _, A0 = field.potential(x[None], t)
        return float(A0[0])

    return q * quad(integrand, t0, t1, epsabs=1e-14, epsrel=1e-13, limit=400)[0]


def free_gaussian_variance(width, mass, t):
    """``sigma^2 (1 + (t / (2 m sigma^2))^2)`` for a free minimum-uncertainty packet."""
    return width**2 * (1 + (t / (2 * mass * width**2)) ** 2)

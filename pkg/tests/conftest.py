"""Shared finite-difference oracles for the test suite.

These stay independent of the analytic derivative code they check: they
only ever evaluate kernel *values* (or first derivatives when checking
second derivatives, to keep the difference quotient well-conditioned).
"""

import numpy as np
import pytest


def central_d1(fn, r, h=1e-6):
    """Central difference first derivative of a scalar function."""
    return (fn(r + h) - fn(r - h)) / (2.0 * h)


def central_d2(fn, r, h=1e-4):
    """Second derivative via central differences of the function values."""
    return (fn(r + h) - 2.0 * fn(r) + fn(r - h)) / (h * h)


def radial_fd_laplacian(phi, r, h=1e-4):
    """2D Laplacian of a radial profile from values only: phi'' + phi'/r."""
    d2 = (phi(r + h) - 2.0 * phi(r) + phi(r - h)) / (h * h)
    d1 = (phi(r + h) - phi(r - h)) / (2.0 * h)
    return d2 + d1 / r


def fd_operator_2d(op, kernel, x, x_s, h=1e-4):
    """Five-point 2D stencil image of L{phi(|x - x_s|)} at a field point."""
    x = np.asarray(x, dtype=float)
    x_s = np.asarray(x_s, dtype=float)

    def u(p):
        return kernel.phi(float(np.linalg.norm(p - x_s)))

    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    lap = (u(x + ex) + u(x - ex) + u(x + ey) + u(x - ey) - 4.0 * u(x)) / (h * h)
    out = op.diff_coeff * lap + op.reaction * u(x)
    v = op.velocity_vec
    if np.any(v):
        gx = (u(x + ex) - u(x - ex)) / (2.0 * h)
        gy = (u(x + ey) - u(x - ey)) / (2.0 * h)
        out -= v[0] * gx + v[1] * gy
    return out


def nested_normal_fd(kernel, x, x_s, n_x, n_s, h=1e-5):
    """Mixed two-normal derivative by nested central differences of values."""
    x = np.asarray(x, dtype=float)
    x_s = np.asarray(x_s, dtype=float)
    n_x = np.asarray(n_x, dtype=float)
    n_s = np.asarray(n_s, dtype=float)

    def source_der(p):
        up = kernel.phi(float(np.linalg.norm(p - (x_s + h * n_s))))
        dn = kernel.phi(float(np.linalg.norm(p - (x_s - h * n_s))))
        return (up - dn) / (2.0 * h)

    return (source_der(x + h * n_x) - source_der(x - h * n_x)) / (2.0 * h)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

"""Planar linear algebra and finite-difference Wirtinger calculus.

Points of the plane are Python/numpy complex numbers, 2x2 real matrices are
numpy arrays of shape ``(..., 2, 2)``.  The gradient matrix of a map
``w = u + iv`` is laid out as ``[[u_x, u_y], [v_x, v_y]]``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import StencilError

FIRST_STEP_MIN = 1e-7
FIRST_STEP_MAX = 1e-3
SECOND_STEP_MAX = 1e-3
EIGEN_TIE = 1e-12


def mat_norms(A):
    """Operator norm ``|A|`` and minimal stretch ``l(A)`` of 2x2 matrices.

    Closed form of the two singular values; broadcasts over leading axes.
    """
    A = np.asarray(A, dtype=float)
    a, b, c, d = A[..., 0, 0], A[..., 0, 1], A[..., 1, 0], A[..., 1, 1]
    # singular values of [[a, b], [c, d]] via the conformal/anticonformal split
    p = np.hypot(a + d, c - b) / 2
    q = np.hypot(a - d, c + b) / 2
    return p + q, np.abs(p - q)


def sym_eigen(A):
    """Eigen-decomposition of a symmetric 2x2 matrix.

    Returns ``(lambda1, lambda2, R)`` with ``lambda1 >= lambda2`` and a proper
    rotation ``R`` whose rows are the eigenvectors, so that
    ``R.T @ diag(lambda1, lambda2) @ R == A``.  For a repeated eigenvalue
    ``R`` is the identity.  Broadcasts over leading axes.
    """
    A = np.asarray(A, dtype=float)
    a, b, d = A[..., 0, 0], A[..., 0, 1], A[..., 1, 1]
    mean = (a + d) / 2
    rad = np.hypot((a - d) / 2, b)
    lam1, lam2 = mean + rad, mean - rad
    t = 0.5 * np.arctan2(2 * b, a - d)
    tie = np.abs(lam1 - lam2) < EIGEN_TIE * (np.abs(lam1) + np.abs(lam2) + 1)
    t = np.where(tie, 0.0, t)
    c, s = np.cos(t), np.sin(t)
    R = np.stack([np.stack([c, s], -1), np.stack([-s, c], -1)], -2)
    return lam1, lam2, R


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def apply_mat(M, z):
    """Apply a real 2x2 matrix to complex numbers viewed as vectors of R^2."""
    M = np.asarray(M, dtype=float)
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    return (M[..., 0, 0] * x + M[..., 0, 1] * y) + 1j * (M[..., 1, 0] * x + M[..., 1, 1] * y)


@dataclass(frozen=True)
class WirtingerPair:
    """Complex partials ``dz = w_z`` and ``dzbar = w_zbar`` (arrays allowed)."""

    dz: np.ndarray
    dzbar: np.ndarray

    @property
    def norm(self):
        return np.abs(self.dz) + np.abs(self.dzbar)

    @property
    def minstretch(self):
        return np.abs(np.abs(self.dz) - np.abs(self.dzbar))

    def partials(self):
        """``(w_x, w_y)`` recovered from the Wirtinger pair."""
        return self.dz + self.dzbar, 1j * (self.dz - self.dzbar)

    def matrix(self):
        """Gradient matrix ``[[u_x, u_y], [v_x, v_y]]``."""
        wx, wy = self.partials()
        return np.stack(
            [np.stack([wx.real, wy.real], -1), np.stack([wx.imag, wy.imag], -1)], -2
        )


def domain_radius(f):
    return getattr(f, "domain_radius", np.inf)


def default_step(z, radius):
    """First-derivative step: ``1e-4 * dist(z, boundary)`` clamped."""
    dist = radius - np.abs(z)
    if np.isinf(radius):
        return np.full(np.shape(z), FIRST_STEP_MAX)
    return np.clip(1e-4 * dist, FIRST_STEP_MIN, FIRST_STEP_MAX)


def second_step(z, radius):
    """Step for second differences: ``1e-3`` unless the boundary is closer."""
    dist = radius - np.abs(z)
    return np.minimum(SECOND_STEP_MAX, dist / 2)


def _check_stencil(z, h, radius, reach):
    if np.isinf(radius):
        return
    bad = np.abs(z) + reach * h > radius * (1 + 1e-15)
    if np.any(bad) or np.any(h <= 0):
        zb = np.asarray(z)[bad] if np.ndim(z) else z
        raise StencilError(f"stencil of radius {reach}h leaves |z| <= {radius} at {zb!r}")


def partials(f, z, h=None):
    """Central differences ``(f_x, f_y)`` of a vectorised map at points ``z``."""
    z = np.asarray(z, dtype=complex)
    radius = domain_radius(f)
    h = default_step(z, radius) if h is None else np.broadcast_to(np.asarray(h, float), z.shape)
    _check_stencil(z, h, radius, 1.0)
    fx = (f(z + h) - f(z - h)) / (2 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return fx, fy


def wirtinger(w, z, h=None):
    """Finite-difference Wirtinger derivatives of ``w`` at ``z``."""
    wx, wy = partials(w, z, h)
    return WirtingerPair(dz=(wx - 1j * wy) / 2, dzbar=(wx + 1j * wy) / 2)


def hessian(f, z, h=None):
    """Nine-point second differences ``(f_xx, f_xy, f_yy)``."""
    z = np.asarray(z, dtype=complex)
    radius = domain_radius(f)
    h = second_step(z, radius) if h is None else np.broadcast_to(np.asarray(h, float), z.shape)
    _check_stencil(z, h, radius, np.sqrt(2.0))
    f0 = f(z)
    fxx = (f(z + h) - 2 * f0 + f(z - h)) / h**2
    fyy = (f(z + 1j * h) - 2 * f0 + f(z - 1j * h)) / h**2
    d1, d2 = h * (1 + 1j), h * (1 - 1j)
    fxy = (f(z + d1) - f(z + d2) - f(z - d2) + f(z - d1)) / (4 * h**2)
    return fxx, fxy, fyy


def gradient_modulus(f, z, h=None):
    """Euclidean length of the gradient of a real scalar field."""
    fx, fy = partials(f, z, h)
    return np.hypot(np.real(fx), np.real(fy))


def inner(a, b):
    """Euclidean inner product of complex numbers viewed in R^2."""
    return np.real(a * np.conj(b))

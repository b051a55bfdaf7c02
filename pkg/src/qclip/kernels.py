"""Poisson kernel, harmonic extension and Green-function gradients of disks."""
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, DomainError

DEFAULT_NODES = 512
EXTENSION_LIMIT = 0.99


@dataclass(frozen=True)
class DiskSpec:
    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    def normalize(self, zeta):
        """The affine map onto the unit disk, ``(zeta - center) / radius``."""
        return (np.asarray(zeta, dtype=complex) - self.center) / self.radius


@dataclass(frozen=True)
class BoundaryTrace:
    """Uniform samples of a function on the circle bounding ``disk``.

    Sample ``j`` sits at ``center + radius * exp(2j*pi*j/n)``.
    """

    values: np.ndarray
    disk: DiskSpec = field(default_factory=DiskSpec)

    def __post_init__(self):
        v = np.asarray(self.values)
        n = v.shape[0]
        if n < 16 or n % 2:
            raise ValueError(f"trace needs an even number >= 16 of samples, got {n}")
        if not np.all(np.isfinite(v)):
            raise ValueError("trace samples must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, f, disk=None, n=DEFAULT_NODES):
        disk = disk or DiskSpec()
        return cls(np.asarray(f(cls.nodes(disk, n))), disk)

    @staticmethod
    def nodes(disk, n):
        return disk.center + disk.radius * np.exp(2j * np.pi * np.arange(n) / n)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def points(self):
        return self.nodes(self.disk, self.n)

    def mean(self):
        """Integral against normalised arc length (trapezoid rule)."""
        return self.values.mean(axis=0)


def poisson_kernel(z, eta):
    """``P(z, eta) = (1 - |z|^2) / |z - eta|^2`` on the unit disk."""
    z = np.asarray(z, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise DomainError("poisson_kernel: z must lie in the open unit disk")
    if np.any(np.abs(np.abs(eta) - 1) > 1e-12):
        raise DomainError("poisson_kernel: eta must lie on the unit circle")
    return (1 - np.abs(z) ** 2) / np.abs(z - eta) ** 2


def harmonic_extension(trace, z, limit=EXTENSION_LIMIT):
    """Trapezoid-rule Poisson integral of ``trace`` evaluated at ``z``."""
    z = np.asarray(z, dtype=complex)
    zn = trace.disk.normalize(z)
    if np.any(np.abs(zn) > limit):
        raise DomainError(
            f"harmonic_extension: points beyond {limit} of the radius are unreliable"
        )
    eta = np.exp(2j * np.pi * np.arange(trace.n) / trace.n)
    P = (1 - np.abs(zn[..., None]) ** 2) / np.abs(zn[..., None] - eta) ** 2
    return (P * trace.values).mean(axis=-1)


def _unit_green_parts(z, w):
    if np.any(z == w):
        raise DegenerateError("green_gradient: coincident points")
    grad = (1 - np.abs(w) ** 2) / ((np.conj(z) - np.conj(w)) * (w * np.conj(z) - 1))
    dw = -1 / (1 - w * np.conj(z)) ** 2
    dwbar = -1 / (np.conj(w) - np.conj(z)) ** 2
    return grad, dw, dwbar


def green_gradient(disk, zeta, omega):
    """Gradient in ``zeta`` of the disk Green function and its ``omega`` derivatives.

    The gradient is the complex number ``G_x + i G_y`` of
    ``log(|1 - z conj(w)| / |z - w|)`` with ``z, w`` the normalised points.
    ``mixed_dw`` / ``mixed_dwbar`` are its Wirtinger derivatives in ``omega``.
    """
    zeta = np.asarray(zeta, dtype=complex)
    omega = np.asarray(omega, dtype=complex)
    z, w = disk.normalize(zeta), disk.normalize(omega)
    if np.any(np.abs(z) >= 1) or np.any(np.abs(w) >= 1):
        raise DomainError("green_gradient: points must lie inside the disk")
    grad, dw, dwbar = _unit_green_parts(z, w)
    R = disk.radius
    return grad / R, dw / R**2, dwbar / R**2


def green_omega_partials(disk, zeta, omega):
    """Derivatives of the Green gradient along ``omega_1`` and ``omega_2``."""
    _, dw, dwbar = green_gradient(disk, zeta, omega)
    return dw + dwbar, 1j * (dw - dwbar)


def poisson_gradient_bound(trace, Z, h=None):
    """Both sides of the Poisson-gradient estimate at the centre of ``trace.disk``.

    ``lhs`` is the finite-difference gradient modulus of the harmonic
    extension at the centre, ``rhs`` is ``(2 / rho^2)`` times the circle
    integral of ``|Y - Z|`` for the arc measure ``ds / (2 pi)``, which equals
    ``(2 / rho) * mean |Y - Z|``.
    """
    rho = trace.disk.radius
    c = trace.disk.center
    h = 1e-4 * rho if h is None else h
    H = lambda z: harmonic_extension(trace, z)
    hx = (H(c + h) - H(c - h)) / (2 * h)
    hy = (H(c + 1j * h) - H(c - 1j * h)) / (2 * h)
    # complex-valued traces: gradient of each component, operator norm
    if np.iscomplexobj(trace.values):
        lhs = _complex_grad_norm(hx, hy)
    else:
        lhs = float(np.hypot(hx, hy))
    integral = rho * np.abs(trace.values - Z).mean()
    return lhs, 2 / rho**2 * integral


def _complex_grad_norm(wx, wy):
    dz, dzbar = (wx - 1j * wy) / 2, (wx + 1j * wy) / 2
    return float(abs(dz) + abs(dzbar))

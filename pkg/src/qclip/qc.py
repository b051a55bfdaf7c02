"""Quasiconformal measurements: dilatation, polar factorisation, Mori bounds."""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateError, DomainError
from .geometry import domain_radius, inner, partials, second_step, wirtinger
from .elliptic import apply_L
from .report import VerificationReport, report_from_slack

ZERO_EXCLUSION = 0.05


@dataclass
class MappingSample:
    """A planar map given by a vectorised evaluator on (a neighbourhood of) the disk.

    ``domain_radius`` bounds where the evaluator may be called, so stencils
    centred on the closed unit disk stay valid when it exceeds 1.
    """

    func: Callable
    domain_radius: float = 1.0
    K: Optional[float] = None
    a: Optional[complex] = None
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    boundary_nodes: Optional[int] = None

    def __call__(self, z):
        return self.func(np.asarray(z, dtype=complex))

    def rho(self):
        """``|w|`` as a sampled scalar field."""
        return _Scalar(lambda s: np.abs(self.func(s)), self.domain_radius)

    def unit(self):
        """``S = w / |w|`` as a sampled field."""
        def S(s):
            v = self.func(s)
            return v / np.abs(v)
        return _Scalar(S, self.domain_radius)

    def component(self, i):
        f = (lambda s: self.func(s).real) if i == 0 else (lambda s: self.func(s).imag)
        return _Scalar(f, self.domain_radius)

    def grad_norm(self, z, h=None):
        return wirtinger(self, z, h).norm

    def boundary_values(self, n):
        return self.func(np.exp(2j * np.pi * np.arange(n) / n))


@dataclass
class _Scalar:
    func: Callable
    domain_radius: float

    def __call__(self, z):
        return self.func(np.asarray(z, dtype=complex))


def polar_grid(n_r, n_theta, r_max=1.0, r_min=0.0):
    r = np.linspace(r_min, r_max, n_r)
    t = 2 * np.pi * np.arange(n_theta) / n_theta
    return (r[:, None] * np.exp(1j * t[None, :])).ravel()


def dilatation(pair):
    """``(k, K)`` from a Wirtinger pair; arrays broadcast."""
    a, b = np.abs(pair.dz), np.abs(pair.dzbar)
    if np.any(a <= b):
        raise DegenerateError("dilatation: map is not sense-preserving and nondegenerate")
    k = b / a
    return k, (1 + k) / (1 - k)


def measured_dilatation(sample, points, h=None):
    """Largest pointwise dilatation ``K`` of ``sample`` over ``points``."""
    _, K = dilatation(wirtinger(sample, points, h))
    return float(np.max(K))


def _require_away_from_zero(sample, z):
    rho = np.abs(sample(z))
    if np.any(rho <= ZERO_EXCLUSION):
        raise DomainError(f"sample points must satisfy |w| > {ZERO_EXCLUSION}")
    return rho


def polar_quantities(sample, z, h=None, method="chain"):
    """``(rho, |grad rho|, rho|grad S|, |grad w|)`` at ``z`` by finite differences.

    ``method="chain"`` differentiates ``w`` only and forms the derivatives of
    ``rho = |w|`` and ``S = w/rho`` by the chain rule, which avoids the
    ``1/rho^3`` amplification of stencil error near the zero of ``w``;
    ``method="direct"`` differences ``rho`` and ``S`` themselves.
    """
    z = np.asarray(z, dtype=complex)
    rho = _require_away_from_zero(sample, z)
    pair = wirtinger(sample, z, h)
    if method == "direct":
        rx, ry = partials(sample.rho(), z, h)
        return rho, np.hypot(rx.real, ry.real), rho * wirtinger(sample.unit(), z, h).norm, pair.norm
    if method != "chain":
        raise ValueError(f"unknown method {method!r}")
    w = sample(z)
    wz, wzb = pair.dz, pair.dzbar
    # rho_z = (conj(w) w_z + w conj(w_zbar)) / (2 rho); rho is real so |grad rho| = 2|rho_z|
    rho_z = (np.conj(w) * wz + w * np.conj(wzb)) / (2 * rho)
    S_z = wz / rho - w * rho_z / rho**2
    S_zb = wzb / rho - w * np.conj(rho_z) / rho**2
    return rho, 2 * np.abs(rho_z), rho * (np.abs(S_z) + np.abs(S_zb)), pair.norm


def polar_audit(sample, K, points, h=None, tol=1e-6, method="chain"):
    """Slacks of ``rho|grad S| <= K|grad rho|``, ``|grad rho| <= K rho|grad S|``
    and ``|grad w|/K <= |grad rho| <= |grad w|``."""
    z = np.ravel(np.asarray(points, dtype=complex))
    _, gr, rgs, gw = polar_quantities(sample, z, h, method)
    checks = [
        report_from_slack("rho|grad S| <= K|grad rho|", K * gr - rgs, z, tol),
        report_from_slack("|grad rho| <= K rho|grad S|", K * rgs - gr, z, tol),
        report_from_slack("|grad w|/K <= |grad rho|", gr - gw / K, z, tol),
        report_from_slack("|grad rho| <= |grad w|", gw - gr, z, tol),
    ]
    rep = VerificationReport.combine("polar factorisation inequalities", checks)
    rep.extra["max_equality_gap"] = float(np.max(np.abs(rgs - gr)))
    return rep


def radial_operator_identity(sample, field, z, h=None):
    """Both sides of ``L[rho] = rho(a11|p|^2 + 2a12<p,q> + a22|q|^2) + <L[w], S>``.

    ``p`` and ``q`` are the ``x`` and ``y`` derivatives of ``S = w/|w|``.
    """
    z = np.asarray(z, dtype=complex)
    rho = _require_away_from_zero(sample, z)
    if h is None:
        h = second_step(z, domain_radius(sample))
    lhs = apply_L(sample.rho(), field, z, h)
    S = sample(z) / rho
    p, q = partials(sample.unit(), z, h)
    A = field(z)
    quad = A[..., 0, 0] * np.abs(p) ** 2 + 2 * A[..., 0, 1] * inner(p, q) + A[..., 1, 1] * np.abs(q) ** 2
    rhs = rho * quad + inner(apply_L(sample, field, z, h), S)
    return lhs, rhs


def theta_constant(K, Lambda, B):
    """Growth constant of ``|w|``: ``2 K Lambda + B K``."""
    return 2 * K * Lambda + B * K


def component_growth_constant(k, B):
    """Coefficient ``B (1 + (1+k)^2/(1-k)^2)`` inherited by each real component."""
    if not 0 <= k < 1:
        raise DomainError("component_growth_constant needs 0 <= k < 1")
    return B * (1 + (1 + k) ** 2 / (1 - k) ** 2)


def k_from_K(K):
    return (K - 1) / (K + 1)


def qc_modulus(t, K, a=0.0):
    """Modulus of continuity ``min(16 t^{1/K}, 2)`` of a K-q.c. disk self-map.

    With ``a != 0`` (the preimage of 0) the distortion of the normalising
    Moebius map, ``(1+|a|)/(1-|a|)``, is absorbed into ``t``.
    """
    t = np.asarray(t, dtype=float)
    s = (1 + abs(a)) / (1 - abs(a))
    return np.minimum(16 * (s * t) ** (1 / K), 2.0)


def empirical_modulus(f, points, bins, rng=None, n_pairs=20000):
    """Binned estimate of ``sup |f(z) - f(z')|`` over ``|z - z'| <= t``.

    Returns the running maximum over ``bins`` (upper bin edges), so the
    estimate is nondecreasing.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    pts = np.ravel(np.asarray(points, dtype=complex))
    i = rng.integers(0, pts.size, n_pairs)
    j = rng.integers(0, pts.size, n_pairs)
    d = np.abs(pts[i] - pts[j])
    df = np.abs(f(pts[i]) - f(pts[j]))
    bins = np.asarray(bins, dtype=float)
    out = np.array([df[d <= b].max() if np.any(d <= b) else 0.0 for b in bins])
    return np.maximum.accumulate(out)


def mobius_factor(a, z):
    return np.abs((a - z) / (1 - z * np.conj(a)))


def mori_audit(sample, K, a, pairs, points, tol=1e-9):
    """Upper Hoelder bound ``16|z1-z2|^{1/K}`` over ``pairs`` and lower bound
    ``4^{1-K} |(a-z)/(1-z conj a)|^K <= |w(z)|`` over ``points``."""
    z1, z2 = (np.ravel(np.asarray(p, dtype=complex)) for p in pairs)
    upper = 16 * np.abs(z1 - z2) ** (1 / K) - np.abs(sample(z1) - sample(z2))
    up = report_from_slack("|w(z1)-w(z2)| <= 16|z1-z2|^(1/K)", upper, z1, tol)
    if a is None:
        raise DomainError("mori_audit: the lower bound needs the zero a of w")
    z = np.ravel(np.asarray(points, dtype=complex))
    lower = np.abs(sample(z)) - 4.0 ** (1 - K) * mobius_factor(a, z) ** K
    lo = report_from_slack("4^(1-K)|(a-z)/(1-z a*)|^K <= |w(z)|", lower, z, tol)
    return VerificationReport.combine("Mori distortion bounds", [up, lo])

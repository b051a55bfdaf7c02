"""Coefficient fields, the operator ``L[u] = a^{ij} D_ij u`` and its audits."""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError
from .geometry import apply_mat, domain_radius, hessian, mat_norms, second_step, sym_eigen, wirtinger
from .report import VerificationReport, report_from_slack

E_DIAG = np.array([[1.0, 0.0], [0.0, -1.0]])
E_OFFDIAG = np.array([[0.0, 1.0], [1.0, 0.0]])
C_TOL = 100.0


@dataclass(frozen=True)
class CoefficientField:
    """Symmetric matrix field ``A(z)`` with declared ellipticity and Lipschitz constants.

    ``evaluator`` maps an array of complex points to an array of shape
    ``(..., 2, 2)``.
    """

    evaluator: Callable
    Lambda: float = 1.0
    LipL: float = 0.0
    tag: str = "custom"

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.broadcast_to(self.evaluator(z), z.shape + (2, 2))


@dataclass(frozen=True)
class GrowthParams:
    B: float = 0.0
    Gamma: float = 0.0

    def __post_init__(self):
        if self.B < 0 or self.Gamma < 0:
            raise ValueError("growth constants must be nonnegative")


def identity_field():
    return CoefficientField(lambda z: np.eye(2), 1.0, 0.0, "identity")


def constant_field(M):
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2) or M[0, 1] != M[1, 0]:
        raise ConfigError("constant field needs a symmetric 2x2 matrix")
    lam1, lam2, _ = sym_eigen(M)
    if lam2 <= 0:
        raise ConfigError("constant field must be positive definite")
    return CoefficientField(lambda z: M, float(max(lam1, 1 / lam2, 1.0)), 0.0, "constant")


# smooth profiles s(z) with |s| <= 1 and gradient bound on the closed unit disk
_SMOOTH = {
    "re": (lambda z: z.real, 1.0),
    "abs2": (lambda z: np.abs(z) ** 2, 2.0),
    "sin": (lambda z: np.sin(z.real) * np.cos(z.imag), 1.0),
}


def tilt_field(epsilon, smooth="re", direction="diag"):
    """``A(z) = I + epsilon * s(z) * E`` with ``E`` traceless, ``|E| = 1``.

    Declared constants hold on the closed unit disk: ``Lambda = 1/(1-eps)``
    and ``LipL = eps * sup|grad s|``.
    """
    if not 0 <= epsilon < 1:
        raise ConfigError("tilt epsilon must lie in [0, 1)")
    try:
        s, lip = _SMOOTH[smooth]
    except KeyError:
        raise ConfigError(f"unknown smooth profile {smooth!r}") from None
    E = {"diag": E_DIAG, "offdiag": E_OFFDIAG}[direction]

    def evaluator(z):
        return np.eye(2) + epsilon * s(z)[..., None, None] * E

    return CoefficientField(evaluator, 1 / (1 - epsilon), epsilon * lip, f"tilt:{smooth}:{direction}")


def field_from_config(cfg):
    """Build a field from ``{"family": ..., "epsilon": ..., "Lambda": ..., "LipL": ...}``.

    Explicit ``Lambda``/``LipL`` override the family defaults and are what
    the ellipticity audit checks against.
    """
    cfg = dict(cfg or {"family": "identity"})
    family = cfg.get("family", "identity")
    if family == "identity":
        fld = identity_field()
    elif family == "constant":
        fld = constant_field(cfg["matrix"])
    elif family == "tilt":
        fld = tilt_field(float(cfg.get("epsilon", 0.1)), cfg.get("smooth", "re"), cfg.get("direction", "diag"))
    else:
        raise ConfigError(f"unknown coefficient family {family!r}")
    Lam = float(cfg.get("Lambda", fld.Lambda))
    Lip = float(cfg.get("LipL", fld.LipL))
    if Lam < 1 or Lip < 0:
        raise ConfigError("need Lambda >= 1 and LipL >= 0")
    return CoefficientField(fld.evaluator, Lam, Lip, fld.tag)


@dataclass(frozen=True)
class EllipticityReport:
    Lambda_emp: float
    LipL_emp: float
    passed: bool

    def to_dict(self):
        return {"Lambda_emp": self.Lambda_emp, "LipL_emp": self.LipL_emp, "pass": self.passed}


def ellipticity_audit(field, samples, chunk=512):
    """Empirical ellipticity and Lipschitz constants of ``field`` on ``samples``."""
    z = np.ravel(np.asarray(samples, dtype=complex))
    if z.size < 2:
        raise DomainError("ellipticity_audit needs at least two sample points")
    A = field(z)
    lam1, lam2, _ = sym_eigen(A)
    Lam = float(max(lam1.max(), (1 / lam2).max()))
    lip = 0.0
    for i in range(0, z.size, chunk):
        dz = np.abs(z[i:i + chunk, None] - z[None, :])
        dA = A[i:i + chunk, None] - A[None, :]
        num = mat_norms(dA)[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(dz > 0, num / dz, 0.0)
        lip = max(lip, float(q.max()))
    tol = 1 + 1e-9
    ok = Lam <= field.Lambda * tol and lip <= field.LipL * tol + 1e-15
    return EllipticityReport(Lam, lip, bool(ok))


def apply_L(u, field, z, h=None):
    """``sum a^{ij}(z) D_ij u(z)`` by central second differences.

    Complex-valued ``u`` is handled componentwise, ``L[u + iv] = L[u] + iL[v]``.
    """
    z = np.asarray(z, dtype=complex)
    uxx, uxy, uyy = hessian(u, z, h)
    A = field(z)
    return A[..., 0, 0] * uxx + 2 * A[..., 0, 1] * uxy + A[..., 1, 1] * uyy


def growth_tolerance(h):
    return C_TOL * np.max(h) ** 2


def growth_audit(w, field, params, samples, h=None, first_h=None):
    """Pointwise slack ``B |grad w|^2 + Gamma - |L[w]|``.

    The report also carries ``B_required``, the smallest ``B`` that makes the
    inequality hold on the samples for the given ``Gamma``.
    """
    z = np.ravel(np.asarray(samples, dtype=complex))
    if h is None:
        h = second_step(z, domain_radius(w))
    Lw = np.abs(apply_L(w, field, z, h))
    g2 = wirtinger(w, z, first_h).norm ** 2
    slack = params.B * g2 + params.Gamma - Lw
    with np.errstate(divide="ignore", invalid="ignore"):
        need = np.where(g2 > 0, np.maximum(Lw - params.Gamma, 0) / g2, np.where(Lw > params.Gamma, np.inf, 0))
    rep = report_from_slack("growth |L[w]| <= B|grad w|^2 + Gamma", slack, z, growth_tolerance(h))
    rep.extra["B_required"] = float(need.max())
    rep.extra["max_abs_Lw"] = float(Lw.max())
    return rep


@dataclass(frozen=True)
class TransformRecord:
    T: np.ndarray
    z_p: complex
    lambda1: float
    lambda2: float

    @property
    def zeta_p(self):
        return complex(apply_mat(self.T, self.z_p))

    def to_zeta(self, z):
        return apply_mat(self.T, z)

    def to_z(self, zeta):
        return apply_mat(np.linalg.inv(self.T), zeta)

    def B(self, field, zeta):
        """Transformed coefficients ``T A(z) T^t`` at ``z = T^{-1} zeta``."""
        A = field(self.to_z(zeta))
        return self.T @ A @ self.T.T


def diagonalizing_transform(field, z_p):
    """Linear change of variables making ``A(z_p)`` the identity."""
    A = np.asarray(field(complex(z_p)), dtype=float)
    lam1, lam2, R = sym_eigen(A)
    T = np.diag([lam1 ** -0.5, lam2 ** -0.5]) @ R
    return TransformRecord(T, complex(z_p), float(lam1), float(lam2))


def transformed_field_lipschitz(field, record, samples):
    """Worst ``|B(zeta) - I| / |zeta - zeta_p|`` over ``zeta`` samples."""
    zeta = np.ravel(np.asarray(samples, dtype=complex))
    d = np.abs(zeta - record.zeta_p)
    keep = d > 0
    B = record.B(field, zeta[keep])
    num = mat_norms(B - np.eye(2))[0]
    worst = float((num / d[keep]).max()) if keep.any() else 0.0
    bound = field.Lambda ** 1.5 * field.LipL
    return worst <= bound * (1 + 1e-9) + 1e-12, worst

"""Interior gradient estimate, boundary reduction and the global Lipschitz bound."""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import AlphaExhaustedError, DomainError, InfeasibleLambdaError
from .geometry import partials, second_step, wirtinger
from .elliptic import apply_L
from .qc import component_growth_constant, k_from_K, qc_modulus, theta_constant
from .report import report_from_slack

LAMBDA_GRID = 1024
LAMBDA_DECADES = 12.0
ALPHA_STEPS = 20
ALPHA_CEILING = 1 - 1e-4
BOUNDARY_SAFETY = 1.05


def lambda_grid(Lambda, n=LAMBDA_GRID):
    """Logarithmic grid inside ``(0, 1/(2 sqrt(Lambda)))``, increasing."""
    top = 1 / (2 * np.sqrt(Lambda))
    return top * np.logspace(-LAMBDA_DECADES, 0, n + 1)[:-1]


def quadratic_coefficients(lam, Lambda, LipL, B, Gamma, r_p, varpi, M_loc):
    """``(A0, B0, C0)`` of ``A0 mu^2 + B0 mu + C0 >= 0`` for given ``lam``.

    ``varpi`` is the modulus of continuity in the transformed coordinates.
    """
    lam = np.asarray(lam, dtype=float)
    A0 = 16 * B * Lambda**2 * lam
    B0 = 16 * Lambda**2 * LipL * lam * r_p - Lambda**-0.5
    C0 = 4 * Gamma * r_p**2 * lam + 2 * np.minimum(varpi(lam * r_p), M_loc) / lam
    return A0, B0, C0


def _feasible(lam, Lambda, LipL, A0, B0, C0, r_p):
    half = 0.5 * Lambda**-0.5
    lin = 16 * Lambda**2 * LipL * lam * r_p
    with np.errstate(invalid="ignore", over="ignore"):
        ok = (B0**2 > 4 * A0 * C0) & (B0 < 0) & (lin <= half) & (lin * lam <= half)
    return ok & np.isfinite(C0)


def select_lambda(Lambda, LipL, B, Gamma, d, r_p, modulus, M_loc, n=LAMBDA_GRID):
    """Largest grid value of the localisation radius factor that keeps the
    quadratic discriminant positive and the Lipschitz term below half of
    ``Lambda^{-1/2}`` (both the ``lam`` and ``lam^2`` readings)."""
    if r_p > d:
        raise DomainError(f"r_p={r_p} exceeds the domain diameter d={d}")
    lam = lambda_grid(Lambda, n)
    A0, B0, C0 = quadratic_coefficients(lam, Lambda, LipL, B, Gamma, r_p, modulus, M_loc)
    ok = _feasible(lam, Lambda, LipL, A0, B0, C0, r_p)
    if not ok.any():
        raise InfeasibleLambdaError(
            f"no feasible lambda for Lambda={Lambda}, LipL={LipL}, B={B}, Gamma={Gamma}, r_p={r_p}"
        )
    return float(lam[np.nonzero(ok)[0][-1]])


@dataclass
class InteriorEstimate:
    a: complex
    rho_a: float
    lam: float
    A0: float
    B0: float
    C0: float
    mu1: float
    mu1_bound: float
    P_bound: float
    Q_bound: float
    R_bound: float
    C0_coef: float
    C1_coef: float
    M_loc: float
    gradient_bound: float
    cap_branch: bool

    def bound(self, sup_u=None):
        """``C0_coef / rho_a * sup_u + C1_coef`` (defaults to the recorded sup)."""
        s = self.M_loc if sup_u is None else sup_u
        return self.C0_coef / self.rho_a * s + self.C1_coef

    def to_dict(self):
        d = dict(self.__dict__)
        d["a"] = [self.a.real, self.a.imag]
        return d


def transformed_modulus(modulus, Lambda):
    """Modulus of ``v(zeta) = u(T^{-1} zeta)`` given that of ``u``."""
    return lambda t: modulus(np.sqrt(Lambda) * np.asarray(t))


def interior_estimate(a, Lambda, LipL, B, Gamma, modulus, M_loc, rho_a=None, d=2.0, lam=None):
    """Gradient bound at ``a`` for a solution of ``|L[u]| <= B|grad u|^2 + Gamma``.

    ``modulus`` is the modulus of continuity of ``u`` in the original
    coordinates and ``M_loc`` the sup of ``|u|`` on the disk of radius
    ``rho_a`` about ``a``.  ``rho_a`` defaults to the distance to the unit
    circle.  The free radius ``r_p`` of the interior maximiser is replaced
    by its worst case ``rho_a``.
    """
    a = complex(a)
    rho = 1 - abs(a) if rho_a is None else float(rho_a)
    if not rho > 0:
        raise DomainError("interior_estimate: base point must lie strictly inside")
    varpi = transformed_modulus(modulus, Lambda)
    if lam is None:
        lam = select_lambda(Lambda, LipL, B, Gamma, d, rho, varpi, M_loc)
    A0, B0, C0 = (float(x) for x in quadratic_coefficients(lam, Lambda, LipL, B, Gamma, rho, varpi, M_loc))
    disc = B0**2 - 4 * A0 * C0
    if disc <= 0 or B0 >= 0:
        raise InfeasibleLambdaError(f"lambda={lam} violates the discriminant condition")
    mu1 = 2 * C0 / (-B0 + np.sqrt(disc))
    mu1_bound = -2 * C0 / B0
    w = float(varpi(lam * rho))
    cap = M_loc <= w
    scale = -2 / B0
    if cap:
        c0 = scale * 2 / lam
        c1 = scale * 4 * Gamma * rho * lam
    else:
        c0 = 0.0
        c1 = scale * (4 * Gamma * rho * lam + 2 * w / (lam * rho))
    P = 16 * Lambda**2 * B * lam * mu1**2 / rho + 4 * Gamma * rho * lam
    Q = 16 * Lambda**2 * LipL * lam * mu1
    R = min(2 * w, 2 * M_loc) / (lam * rho)
    return InteriorEstimate(
        a, rho, float(lam), A0, B0, C0, float(mu1), float(mu1_bound), float(P), float(Q), float(R),
        float(c0), float(c1), float(M_loc), float(mu1_bound / rho), bool(cap),
    )


def local_sup(u, a, rho, n_r=32, n_theta=128):
    """Sampled ``max |u|`` over the closed disk of radius ``rho`` about ``a``."""
    r = np.linspace(0, rho, n_r)
    t = 2 * np.pi * np.arange(n_theta) / n_theta
    z = a + (r[:, None] * np.exp(1j * t[None, :])).ravel()
    return float(np.max(np.abs(u(z))))


def _grad_modulus(u, z, h=None):
    ux, uy = partials(u, z, h)
    if np.iscomplexobj(ux) and (np.any(np.imag(ux) != 0) or np.any(np.imag(uy) != 0)):
        dz, dzb = (ux - 1j * uy) / 2, (ux + 1j * uy) / 2
        return np.abs(dz) + np.abs(dzb)
    return np.hypot(np.real(ux), np.real(uy))


def mu_curve(u, a, p_grid, rho_a=None, n_r=256, n_theta=256, h=None):
    """``mu_p = max over B_p of |grad u| (R_p - |z - a|)`` for each ``p``.

    Returns a list of ``(p, mu_p, z_p)``.  Refining ``n_r`` by factors of two
    nests the sample sets, so the scan is monotone under refinement.
    """
    a = complex(a)
    rho = 1 - abs(a) if rho_a is None else rho_a
    t = 2 * np.pi * np.arange(n_theta) / n_theta
    out = []
    for p in p_grid:
        Rp = p * rho
        r = Rp * np.arange(n_r + 1) / n_r
        z = a + (r[:, None] * np.exp(1j * t[None, :])).ravel()
        vals = _grad_modulus(u, z, h) * (Rp - np.abs(z - a))
        i = int(np.argmax(vals))
        out.append((float(p), float(vals[i]), complex(z[i])))
    return out


def nagumo_precondition(B, Gamma, M):
    """``(64/pi) B Gamma M`` and whether it is below 1."""
    value = 64 / np.pi * B * Gamma * M
    return float(value), bool(value < 1)


def cutoff_phi(z, alpha, beta):
    """Bump equal to 1 on ``|z| = alpha`` and flat zero from ``|z| = beta`` on."""
    r2 = np.abs(np.asarray(z, dtype=complex)) ** 2
    out = np.zeros(r2.shape)
    inside = r2 < beta**2
    out[inside] = np.exp(1 / (r2[inside] - beta**2) - 1 / (alpha**2 - beta**2))
    return out


def cutoff_g(u_vals, z, alpha, beta):
    """``g = 1 + (u - 1) phi`` on the annulus (equal to 1 beyond ``beta``)."""
    return 1 + (u_vals - 1) * cutoff_phi(z, alpha, beta)


@dataclass
class BoundaryReduction:
    alpha: float
    beta: float
    theta: float
    B1: float
    Gamma1: float
    M: float
    nagumo_value: float
    nagumo_ok: bool
    residual_inner: float
    residual_outer: float
    curve: list = field(default_factory=list)

    def to_dict(self):
        d = dict(self.__dict__)
        d["curve"] = [list(c) for c in self.curve]
        return d


def B1_constant(K, a, Lambda, B):
    s = (1 + abs(a)) / (1 - abs(a))
    return 2.0 ** (3 * K - 2) * s**K * theta_constant(K, Lambda, B)


def annulus_points(alpha, r_max=1.0, n_r=64, n_theta=256):
    r = np.linspace(alpha, r_max, n_r)
    t = 2 * np.pi * np.arange(n_theta) / n_theta
    return (r[:, None] * np.exp(1j * t[None, :])).ravel()


def annulus_M(sample, alpha, n_r=64, n_theta=256):
    beta = (alpha + 1) / 2
    z = annulus_points(alpha, 1.0, n_r, n_theta)
    u = np.abs(sample(z))
    return float(np.max(np.abs(u - cutoff_g(u, z, alpha, beta))))


def gamma1_estimate(sample, field, alpha, n_r=24, n_theta=128):
    """Sampled max of the cutoff terms ``|(u-1) L[phi] + 2 D[u, phi]|``."""
    beta = (alpha + 1) / 2
    rr = np.linspace(alpha, beta, n_r + 2)[1:-1]
    t = 2 * np.pi * np.arange(n_theta) / n_theta
    z = (rr[:, None] * np.exp(1j * t[None, :])).ravel()
    h = np.minimum(second_step(z, sample.domain_radius), (beta - alpha) / (4 * n_r))
    phi = _Field(lambda s: cutoff_phi(s, alpha, beta))
    u = sample.rho()
    Lphi = apply_L(phi, field, z, h)
    ux, uy = partials(u, z, h)
    px, py = partials(phi, z, h)
    A = field(z)
    D = A[..., 0, 0] * ux * px + A[..., 0, 1] * (ux * py + uy * px) + A[..., 1, 1] * uy * py
    terms = (np.abs(sample(z)) - 1) * Lphi + 2 * D
    return float(np.max(np.abs(terms)))


class _Field:
    domain_radius = np.inf

    def __init__(self, f):
        self.f = f

    def __call__(self, z):
        return self.f(np.asarray(z, dtype=complex))


def boundary_reduction(sample, field, K, a, Lambda=None, B=0.0, alpha=None, n_r=64, n_theta=256, n_boundary=None):
    """Cut-off construction on ``alpha <= |z| < 1`` and the precondition
    ``(64/pi) * 2 B1 M Lambda < 1``; ``alpha`` moves halfway to 1 until it holds."""
    Lambda = field.Lambda if Lambda is None else Lambda
    a = complex(a)
    if abs(sample(np.array([a]))[0]) > 1e-8:
        raise DomainError("boundary_reduction: w(a) must vanish")
    lo = (1 + abs(a)) / 2
    alpha = max(0.5, lo) if alpha is None else float(alpha)
    if not lo <= alpha < 1:
        raise DomainError(f"alpha must lie in [{lo}, 1)")
    B1 = B1_constant(K, a, Lambda, B)
    curve = []
    for _ in range(ALPHA_STEPS + 1):
        M = annulus_M(sample, alpha, n_r, n_theta)
        value = 64 / np.pi * 2 * B1 * M * Lambda
        curve.append((alpha, M, value))
        if value < 1:
            break
        alpha = (alpha + 1) / 2
        if alpha > ALPHA_CEILING:
            raise AlphaExhaustedError(
                f"precondition still fails at alpha={curve[-1][0]:.6g} (value {value:.4g})", curve
            )
    else:
        raise AlphaExhaustedError("alpha bisection budget spent", curve)
    beta = (alpha + 1) / 2
    nb = n_boundary or getattr(sample, "boundary_nodes", None) or 512
    t = 2 * np.pi * np.arange(nb) / nb
    inner_z, outer_z = alpha * np.exp(1j * t), np.exp(1j * t)
    u_in, u_out = np.abs(sample(inner_z)), np.abs(sample(outer_z))
    res_in = float(np.max(np.abs(u_in - cutoff_g(u_in, inner_z, alpha, beta))))
    res_out = float(np.max(np.abs(u_out - cutoff_g(u_out, outer_z, alpha, beta))))
    return BoundaryReduction(
        alpha, beta, theta_constant(K, Lambda, B), B1, gamma1_estimate(sample, field, alpha),
        M, value, True, res_in, res_out, curve,
    )


@dataclass
class PipelineResult:
    C_global: float
    empirical_max_grad: float
    passed: bool
    C_interior: float
    C_boundary: float
    reduction: BoundaryReduction
    interior: list
    rows: list
    report: dict


def lipschitz_pipeline(sample, field, params, K, a, n_r=96, n_theta=256, safety=BOUNDARY_SAFETY):
    """Global gradient bound for a K-q.c. self-map of the disk with ``w(a) = 0``.

    Interior branch (``|z| <= beta``): the interior estimate applied to each
    real component with the component growth constant and the Mori modulus,
    summed.  Boundary branch (``beta < |z| <= 1``): ``K`` times the measured
    sup of ``|grad |w||``, times ``safety``.
    """
    a = complex(a)
    red = boundary_reduction(sample, field, K, a, B=params.B)
    beta = red.beta
    k = k_from_K(K)
    Bc = component_growth_constant(k, params.B)
    modulus = lambda t: qc_modulus(t, K, a)

    radii = np.linspace(0, 1, n_r)
    t = 2 * np.pi * np.arange(n_theta) / n_theta
    z = (radii[:, None] * np.exp(1j * t[None, :]))
    interior = []
    local = np.empty(n_r)
    for i, r in enumerate(radii):
        if r > beta:
            local[i] = np.nan
            continue
        # each component of a self-map is bounded by 1 on every disk
        est = interior_estimate(r, field.Lambda, field.LipL, Bc, params.Gamma, modulus, 1.0, rho_a=1 - r)
        local[i] = 2 * est.gradient_bound
        interior.append(est)
    C_int = float(np.nanmax(local))

    zb = z[radii > beta].ravel()
    grad_u = _grad_modulus(sample.rho(), zb) if zb.size else np.zeros(1)
    C_bdry = float(safety * K * np.max(grad_u))
    C_global = max(C_int, C_bdry)

    zf = z.ravel()
    grad_w = wirtinger(sample, zf).norm
    emp = float(np.max(grad_w))
    bound_local = np.where(np.repeat(radii <= beta, n_theta), np.repeat(np.nan_to_num(local, nan=0.0), n_theta), C_bdry)
    rows = list(zip(zf, grad_w, bound_local))
    slack = report_from_slack("|grad w| <= local bound", bound_local - grad_w, zf)
    report = {
        "constants": {
            "alpha": red.alpha, "beta": red.beta, "Theta": red.theta, "B1": red.B1, "M": red.M,
            "Gamma1": red.Gamma1, "nagumo_value": red.nagumo_value,
            "component_B": Bc, "interior_worst": _worst(interior).to_dict() if interior else None,
        },
        "C_interior": C_int,
        "C_boundary": C_bdry,
        "boundary_branch": "empirical-branch",
        "C_global": C_global,
        "empirical_max_grad": emp,
        "local_slack": slack.to_dict(),
        "pass": emp <= C_global,
    }
    return PipelineResult(C_global, emp, emp <= C_global, C_int, C_bdry, red, interior, rows, report)


def _worst(estimates):
    return max(estimates, key=lambda e: e.gradient_bound)

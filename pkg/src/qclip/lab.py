"""Test-map generators and a finite-difference Dirichlet solver on the disk."""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import NdBSpline, RectBivariateSpline, make_interp_spline
from scipy.optimize import root

from .errors import ConfigError, ConvergenceError, DegenerateError
from .elliptic import field_from_config
from .kernels import BoundaryTrace
from .qc import MappingSample, measured_dilatation, polar_grid

KINDS = ("identity", "mobius", "radial_stretch", "harmonic_extension", "elliptic_fd")
SOLVER_TOL = 1e-8
K_MARGIN = 1.01


@dataclass
class TestMapSpec:
    kind: str
    params: dict = field(default_factory=dict)
    n: int = 64

    __test__ = False  # not a pytest class

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kind = d.pop("kind", None)
        if kind not in KINDS:
            raise ConfigError(f"map kind must be one of {KINDS}, got {kind!r}")
        n = int(d.pop("n", 64))
        return cls(kind, d, n)


def _cplx(v):
    if v is None:
        return 0j
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def boundary_angle(coeffs):
    """``gamma(theta) = theta + sum c_k sin(k theta)`` after a monotonicity check."""
    coeffs = [(int(k), float(c)) for k, c in coeffs]
    if sum(k * abs(c) for k, c in coeffs) >= 1:
        raise ConfigError("boundary map must satisfy sum k|c_k| < 1 to stay monotone")

    def gamma(t):
        t = np.asarray(t, dtype=float)
        return t + sum(c * np.sin(k * t) for k, c in coeffs)

    return gamma


def find_zero(f, z0=0j):
    sol = root(lambda v: [f(np.array([v[0] + 1j * v[1]]))[0].real, f(np.array([v[0] + 1j * v[1]]))[0].imag],
               [z0.real, z0.imag], tol=1e-14)
    z = complex(sol.x[0], sol.x[1])
    if abs(f(np.array([z]))[0]) > 1e-10:
        raise DegenerateError("could not locate the zero of the map")
    return z


def mobius(a, rotation=0.0):
    """Disk automorphism ``e^{i t} (z - a) / (1 - conj(a) z)`` sending ``a`` to 0."""
    a = complex(a)
    if abs(a) >= 1:
        raise ConfigError("mobius parameter must satisfy |a| < 1")
    e = np.exp(1j * rotation)
    radius = 2.0 if a == 0 else min(2.0, 0.5 * (1 + 1 / abs(a)))
    return MappingSample(lambda z: e * (z - a) / (1 - np.conj(a) * z), radius, 1.0, a, "mobius", {"a": a})


def radial_stretch(K):
    if K < 1:
        raise ConfigError("radial stretch needs K >= 1")
    return MappingSample(lambda z: z * np.abs(z) ** (K - 1), 2.0, float(K), 0j, "radial_stretch", {"K": K})


def harmonic_series(values):
    """Harmonic extension of uniform circle samples as a truncated Fourier series."""
    values = np.asarray(values, dtype=complex)
    n = values.size
    c = np.fft.fft(values) / n
    pos, neg = c[: n // 2], np.concatenate([[0], c[::-1][: n // 2 - 1]])
    keep = max(np.nonzero(np.abs(pos) > 1e-17)[0].max(initial=0),
               np.nonzero(np.abs(neg) > 1e-17)[0].max(initial=0)) + 1
    pos, neg = pos[:keep][::-1], neg[:keep][::-1]

    def w(z):
        z = np.asarray(z, dtype=complex)
        return np.polyval(pos, z) + np.polyval(neg, np.conj(z))

    return w, keep


def harmonic_extension_map(coeffs, n_fft=2048, K=None):
    gamma = boundary_angle(coeffs)
    t = 2 * np.pi * np.arange(n_fft) / n_fft
    w, degree = harmonic_series(np.exp(1j * gamma(t)))
    s = MappingSample(w, 1.05, None, None, "harmonic_extension", {"coeffs": coeffs, "degree": degree})
    s.a = find_zero(s)
    s.K = K if K is not None else K_MARGIN * measured_dilatation(s, polar_grid(65, 256))
    return s


def generate_map(spec):
    """Sample of the requested self-map of the closed unit disk."""
    p = spec.params
    if spec.kind == "identity":
        return MappingSample(lambda z: np.asarray(z, dtype=complex), 2.0, 1.0, 0j, "identity", {})
    if spec.kind == "mobius":
        return mobius(_cplx(p.get("a")), float(p.get("rotation", 0.0)))
    if spec.kind == "radial_stretch":
        return radial_stretch(float(p.get("K", 2.0)))
    if spec.kind == "harmonic_extension":
        return harmonic_extension_map(p.get("coeffs", []), K=p.get("K"))
    if spec.kind == "elliptic_fd":
        fld = field_from_config(p.get("field"))
        gamma = boundary_angle(p.get("coeffs", []))
        rhs = p.get("rhs", [0.0, 0.0])
        s = fd_elliptic_solve(fld, (float(rhs[0]), float(rhs[1])), lambda z: np.exp(1j * gamma(np.angle(z))),
                              spec.n, n_theta=p.get("n_theta"))
        s.a = find_zero(s)
        s.K = p.get("K") or K_MARGIN * measured_dilatation(s, polar_grid(65, 256))
        return s
    raise ConfigError(f"unknown map kind {spec.kind!r}")


def _polar_operator(fld, N, m):
    """Sparse FD matrix of ``L`` on the staggered polar grid, plus the boundary coupling.

    Rings sit at ``r_i = (i + 1/2) dr`` with ``dr = 1/(N + 1/2)`` so that the
    ring ``i = N`` is the unit circle; across the origin ring ``-1`` is ring
    ``0`` rotated by ``pi``.
    """
    if m % 2:
        raise ValueError("angular resolution must be even")
    dr, dt = 1 / (N + 0.5), 2 * np.pi / m
    i, j = np.meshgrid(np.arange(N), np.arange(m), indexing="ij")
    r = (i + 0.5) * dr
    t = j * dt
    z = r * np.exp(1j * t)
    A = fld(z)
    a11, a12, a22 = A[..., 0, 0], A[..., 0, 1], A[..., 1, 1]
    c, s = np.cos(t), np.sin(t)
    arr = a11 * c * c + 2 * a12 * s * c + a22 * s * s
    tang = a11 * s * s - 2 * a12 * s * c + a22 * c * c
    mix = -2 * a11 * s * c + 2 * a12 * (c * c - s * s) + 2 * a22 * s * c
    ar, att, art, at = tang / r, tang / r**2, mix / r, -mix / r**2

    stencil = [
        (0, 0, -2 * arr / dr**2 - 2 * att / dt**2),
        (1, 0, arr / dr**2 + ar / (2 * dr)),
        (-1, 0, arr / dr**2 - ar / (2 * dr)),
        (0, 1, att / dt**2 + at / (2 * dt)),
        (0, -1, att / dt**2 - at / (2 * dt)),
        (1, 1, art / (4 * dr * dt)),
        (1, -1, -art / (4 * dr * dt)),
        (-1, 1, -art / (4 * dr * dt)),
        (-1, -1, art / (4 * dr * dt)),
    ]
    rows, cols, vals = [], [], []
    brow, bcol, bval = [], [], []
    me = (i * m + j).ravel()
    for di, dj, w in stencil:
        ii, jj = i + di, (j + dj) % m
        flip = ii < 0
        jj = np.where(flip, (jj + m // 2) % m, jj)
        ii = np.where(flip, 0, ii)
        w = w.ravel()
        bnd = (ii == N).ravel()
        rows.append(me[~bnd]); cols.append((ii * m + jj).ravel()[~bnd]); vals.append(w[~bnd])
        brow.append(me[bnd]); bcol.append(jj.ravel()[bnd]); bval.append(w[bnd])
    L = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N * m, N * m))
    Bc = sp.csr_matrix((np.concatenate(bval), (np.concatenate(brow), np.concatenate(bcol))), shape=(N * m, m))
    return L, Bc, r, t


def _as_callable(f):
    if callable(f):
        return f
    if isinstance(f, (tuple, list)) and len(f) == 2 and not callable(f[0]):
        c = complex(f[0], f[1])
        return lambda z: np.full(np.shape(z), c)
    c = complex(f)
    return lambda z: np.full(np.shape(z), c)


def _boundary_values(boundary, m):
    nodes = np.exp(2j * np.pi * np.arange(m) / m)
    if callable(boundary):
        return np.asarray(boundary(nodes), dtype=complex)
    if isinstance(boundary, BoundaryTrace):
        vals = np.asarray(boundary.values, dtype=complex)
    else:
        u, v = boundary
        vals = np.asarray(u.values, dtype=float) + 1j * np.asarray(v.values, dtype=float)
    if vals.size != m:
        from scipy.signal import resample

        vals = resample(vals, m)
    return vals


@dataclass
class PolarSolution:
    r: np.ndarray
    theta: np.ndarray
    values: np.ndarray  # shape (N + 1, m); last ring is the boundary
    residual: float
    iterations: int

    def node_points(self):
        return self.r[:, None] * np.exp(1j * self.theta[None, :])


def fd_elliptic_solve(fld, rhs, boundary, n, n_theta=None, tol=SOLVER_TOL, method="direct", maxiter=2000):
    """Solve ``L[w] = rhs`` in the unit disk with Dirichlet data ``boundary``.

    Real and imaginary parts share the discrete operator and are solved as
    two independent right-hand sides.  Rows are scaled by their diagonal, so
    the reported residual is the size of one Jacobi update; it is checked
    against ``tol`` after solving.
    """
    N = int(n)
    m = int(n_theta or 4 * N)
    m += m % 2
    L, Bc, r, t = _polar_operator(fld, N, m)
    g = _boundary_values(boundary, m)
    f = _as_callable(rhs)(r * np.exp(1j * t)).ravel()
    # Jacobi row scaling: the residual then equals one relaxation update
    D = sp.diags(1 / np.abs(L.diagonal()))
    L = (D @ L).tocsr()
    b = D @ (f - Bc @ g)
    its = 0
    if method == "direct":
        lu = spla.splu(L.tocsc())
        x = lu.solve(b.real) + 1j * lu.solve(b.imag)
        res = np.max(np.abs(L @ x - b))
        while res > tol and its < 3:
            d = L @ x - b
            x = x - (lu.solve(d.real) + 1j * lu.solve(d.imag))
            res = np.max(np.abs(L @ x - b))
            its += 1
    elif method == "gmres":
        ilu = spla.spilu(L.tocsc(), drop_tol=1e-6)
        Mop = spla.LinearOperator(L.shape, ilu.solve)
        parts = []
        for comp in (b.real, b.imag):
            xc, info = spla.gmres(L, comp, M=Mop, rtol=1e-14, atol=tol / 10, maxiter=maxiter)
            parts.append(xc)
            its = max(its, info)
        x = parts[0] + 1j * parts[1]
        res = np.max(np.abs(L @ x - b))
    else:
        raise ValueError(f"unknown method {method!r}")
    if res > tol:
        raise ConvergenceError(f"FD solve stopped with residual {res:.3e} > {tol:.1e}", res)
    grid = np.concatenate([x.reshape(N, m), g[None, :]], axis=0)
    rr = np.concatenate([r[:, 0], [1.0]])
    sol = PolarSolution(rr, t[0], grid, float(res), its)
    return solution_sample(sol)


def polar_interpolant(sol):
    """Tensor cubic spline in ``(r, theta)`` with the data mirrored through the origin."""
    m = sol.theta.size
    vals = sol.values
    mirror = np.roll(vals, -m // 2, axis=1)[::-1]
    R = np.concatenate([-sol.r[::-1], sol.r])
    V = np.concatenate([mirror, vals], axis=0)
    T = np.concatenate([sol.theta, [2 * np.pi]])
    V = np.concatenate([V, V[:, :1]], axis=1)
    splines = []
    for part in (V.real, V.imag):
        sr = make_interp_spline(R, part, k=3, axis=0)
        st = make_interp_spline(T, sr.c.T, k=3, axis=0, bc_type="periodic")
        splines.append(NdBSpline((sr.t, st.t), st.c.T, 3, extrapolate=True))

    def f(z):
        z = np.asarray(z, dtype=complex)
        pts = np.stack([np.abs(z).ravel(), np.mod(np.angle(z), 2 * np.pi).ravel()], -1)
        re, im = (s(pts) for s in splines)
        return (re + 1j * im).reshape(z.shape)

    return f


def _blend(r, r0=0.3, r1=0.5):
    """Smooth step: 1 for ``r <= r0``, 0 for ``r >= r1``."""
    x = np.clip((r - r0) / (r1 - r0), 0, 1)
    out = np.ones_like(x)
    mid = (x > 0) & (x < 1)
    e1 = np.exp(-1 / x[mid])
    e2 = np.exp(-1 / (1 - x[mid]))
    out[mid] = e2 / (e1 + e2)
    out[x >= 1] = 0.0
    return out


def solution_sample(sol, n_cart=None, half_width=0.6, radius=1.05):
    """Wrap a polar solution as a ``MappingSample``.

    Polar interpolation is used away from the origin; near it, where polar
    coordinates degenerate, a Cartesian bicubic resampling takes over through a
    smooth partition of unity on ``0.3 <= |z| <= 0.5``.
    """
    polar = polar_interpolant(sol)
    N = sol.r.size - 1
    n_cart = n_cart or max(65, 2 * N + 1)
    x = np.linspace(-half_width, half_width, n_cart)
    vals = polar(x[:, None] + 1j * x[None, :])
    sre = RectBivariateSpline(x, x, vals.real, kx=3, ky=3)
    sim = RectBivariateSpline(x, x, vals.imag, kx=3, ky=3)

    def w(z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        chi = _blend(r)
        out = polar(z).astype(complex)
        near = chi > 0
        if np.any(near):
            zn = z[near]
            cart = sre.ev(zn.real, zn.imag) + 1j * sim.ev(zn.real, zn.imag)
            out[near] = chi[near] * cart + (1 - chi[near]) * out[near]
        return out

    s = MappingSample(w, radius, None, None, "elliptic_fd",
                      {"residual": sol.residual, "N": N, "m": sol.theta.size}, sol.theta.size)
    s.solution = sol
    return s

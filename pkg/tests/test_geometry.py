import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from qclip.errors import StencilError
from qclip.geometry import WirtingerPair, apply_mat, hessian, mat_norms, partials, rotation, sym_eigen, wirtinger
from qclip.qc import MappingSample

entries = st.floats(-10, 10, allow_nan=False)
mats = arrays(float, (2, 2), elements=entries)


def test_norm_examples():
    assert mat_norms(np.eye(2)) == pytest.approx((1, 1))
    assert mat_norms(np.diag([2, 0.5])) == pytest.approx((2, 0.5))
    pair = WirtingerPair(1.0 + 0j, 0.5 + 0j)
    assert (pair.norm, pair.minstretch) == pytest.approx((1.5, 0.5))
    assert mat_norms(pair.matrix()) == pytest.approx((1.5, 0.5))


def test_norms_match_svd(rng):
    A = rng.uniform(-10, 10, (500, 2, 2))
    s = np.linalg.svd(A, compute_uv=False)
    n, l = mat_norms(A)
    assert np.allclose(n, s[:, 0], atol=1e-12)
    assert np.allclose(l, s[:, 1], atol=1e-11)


@given(mats)
def test_stretch_sandwich(A):
    # minstretch(A) <= |A e| <= norm(A) on a 360-point circle
    e = np.exp(2j * np.pi * np.arange(360) / 360)
    v = np.abs(apply_mat(A, e))
    n, l = mat_norms(A)
    assert np.all(v <= n + 1e-12)
    assert np.all(v >= l - 1e-12)


@pytest.mark.parametrize("f, expect", [(lambda z: z, (1, 0)), (lambda z: np.conj(z), (0, 1))])
def test_wirtinger_simple(f, expect):
    pair = wirtinger(f, np.array([0.3 - 0.2j, -0.5j]))
    assert np.allclose(pair.dz, expect[0], atol=1e-9)
    assert np.allclose(pair.dzbar, expect[1], atol=1e-9)


def test_wirtinger_against_symbolic_oracle():
    # z|z| at z=0.5, derivatives by hand-free symbolic differentiation
    x, y = sp.symbols("x y", real=True)
    w = (x + sp.I * y) * sp.sqrt(x**2 + y**2)
    dz = sp.Rational(1, 2) * (sp.diff(w, x) - sp.I * sp.diff(w, y))
    dzb = sp.Rational(1, 2) * (sp.diff(w, x) + sp.I * sp.diff(w, y))
    sub = {x: sp.Rational(1, 2), y: 0}
    f = lambda z: z * np.abs(z)
    pair = wirtinger(f, np.array([0.5 + 0j]), 1e-4)
    assert complex(dz.subs(sub)) == pytest.approx(0.75)
    assert complex(dzb.subs(sub)) == pytest.approx(0.25)
    assert abs(pair.dz[0] - 0.75) < 1e-7
    assert abs(pair.dzbar[0] - 0.25) < 1e-7


def test_wirtinger_reconstruction_second_order():
    f = lambda z: np.exp(z) + 0.3 * np.conj(z) ** 2
    z = np.array([0.2 + 0.1j])
    ux_exact = np.exp(z) + 0.6 * np.conj(z)
    uy_exact = 1j * np.exp(z) - 0.6j * np.conj(z)
    errs = []
    for h in (1e-2, 5e-3):
        pair = wirtinger(f, z, h)
        wx, wy = pair.partials()
        # u_x = Re(dz + dzbar), u_y = -Im(dz - dzbar)
        assert np.allclose(wx.real, (pair.dz + pair.dzbar).real)
        assert np.allclose(wy.real, -(pair.dz - pair.dzbar).imag)
        errs.append(max(np.abs(wx - ux_exact).max(), np.abs(wy - uy_exact).max()))
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_sym_eigen_examples():
    l1, l2, R = sym_eigen(np.eye(2))
    assert (l1, l2) == (1, 1) and np.array_equal(R, np.eye(2))
    l1, l2, R = sym_eigen(np.diag([4.0, 1.0]))
    assert (l1, l2) == (4, 1) and np.allclose(R, np.eye(2))
    l1, l2, R = sym_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
    # characteristic polynomial lambda^2 - 4 lambda + 3
    lam = sp.symbols("lam")
    roots = sorted(float(r) for r in sp.solve(lam**2 - 4 * lam + 3, lam))
    assert (l2, l1) == pytest.approx(roots)
    assert np.allclose(R, rotation(-np.pi / 4))


def test_sym_eigen_roundtrip(rng):
    a = rng.uniform(-10, 10, (10000, 3))
    A = np.stack([np.stack([a[:, 0], a[:, 1]], -1), np.stack([a[:, 1], a[:, 2]], -1)], -2)
    l1, l2, R = sym_eigen(A)
    D = np.zeros_like(A)
    D[:, 0, 0], D[:, 1, 1] = l1, l2
    back = np.swapaxes(R, -1, -2) @ D @ R
    assert np.max(np.abs(back - A)) <= 1e-12 * 10 * 2
    assert np.all(l1 >= l2)
    assert np.allclose(np.linalg.det(R), 1)


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
def test_sym_eigen_property(a, b, d):
    A = np.array([[a, b], [b, d]])
    l1, l2, R = sym_eigen(A)
    assert np.max(np.abs(R.T @ np.diag([l1, l2]) @ R - A)) <= 1e-12 * max(1, np.abs(A).max()) * 4


def test_hessian_exact_on_quadratics():
    f = lambda z: z.real**2 + 3 * z.real * z.imag - z.imag**2
    fxx, fxy, fyy = hessian(f, np.array([0.1 + 0.2j]), 1e-3)
    assert fxx[0] == pytest.approx(2, abs=1e-6)
    assert fxy[0] == pytest.approx(3, abs=1e-6)
    assert fyy[0] == pytest.approx(-2, abs=1e-6)


def test_stencil_must_stay_in_domain():
    s = MappingSample(lambda z: z, domain_radius=1.0)
    with pytest.raises(StencilError):
        partials(s, np.array([0.9999 + 0j]), 1e-3)
    # default step shrinks with the distance to the boundary
    fx, _ = partials(s, np.array([0.9999 + 0j]))
    assert abs(fx[0] - 1) < 1e-8

"""Error of the polar FD Dirichlet solver against closed-form solutions."""
import argparse

import numpy as np

from qclip.elliptic import constant_field, identity_field, tilt_field
from qclip.lab import fd_elliptic_solve


def problems():
    t = tilt_field(0.2, "abs2", "offdiag")

    def tilt_rhs(z):
        x, y = z.real, z.imag
        e, A = np.exp(x * y), t(z)
        return A[..., 0, 0] * y * y * e + 2 * A[..., 0, 1] * (1 + x * y) * e + A[..., 1, 1] * x * x * e

    return {
        "harmonic e^x sin y": (identity_field(), lambda z: np.exp(z.real) * np.sin(z.imag), 0.0),
        "diag(2,0.5) sin x cos y": (constant_field(np.diag([2.0, 0.5])), lambda z: np.sin(z.real) * np.cos(z.imag),
                                    lambda z: -2.5 * np.sin(z.real) * np.cos(z.imag)),
        "tilt e^{xy}": (t, lambda z: np.exp(z.real * z.imag), tilt_rhs),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128])
    args = ap.parse_args()
    for name, (fld, exact, rhs) in problems().items():
        print(name)
        prev = None
        for n in args.sizes:
            sol = fd_elliptic_solve(fld, rhs, exact, n).solution
            err = np.max(np.abs(sol.values - exact(sol.node_points())))
            ratio = "" if prev is None else f"ratio {prev / err:.3f}"
            print(f"  n={n:4d} err={err:.3e} residual={sol.residual:.1e} {ratio}")
            prev = err


if __name__ == "__main__":
    main()

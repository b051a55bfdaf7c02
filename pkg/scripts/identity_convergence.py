"""Stencil convergence of the radial operator identity on conformal and stretch maps."""
import numpy as np

from qclip.elliptic import identity_field, tilt_field
from qclip.lab import mobius, radial_stretch
from qclip.qc import MappingSample, radial_operator_identity


def main():
    rng = np.random.default_rng(0)
    r = np.sqrt(rng.uniform(0.05**2, 0.95**2, 2000))
    z = r * np.exp(2j * np.pi * rng.uniform(size=r.size))
    maps = {
        "identity": MappingSample(lambda s: s, 2.0),
        "mobius 0.3": mobius(0.3),
        "mobius 0.45": mobius(-0.2 + 0.4j),
        "stretch K=2": radial_stretch(2.0),
        "stretch K=4": radial_stretch(4.0),
    }
    hs = [4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4]
    for fld in (identity_field(), tilt_field(0.2, "sin", "offdiag")):
        print(fld.tag)
        for name, s in maps.items():
            zz = z[np.abs(s(z)) > 0.3]
            res = [np.max(np.abs(np.subtract(*radial_operator_identity(s, fld, zz, h)))) for h in hs]
            cells = " ".join(f"{v / h**2:7.2f}" for v, h in zip(res, hs))
            print(f"  {name:12s} residual/h^2: {cells}   last ratio {res[-2] / res[-1]:.3f}")


if __name__ == "__main__":
    main()

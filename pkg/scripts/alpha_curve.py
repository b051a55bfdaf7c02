"""Cut-off precondition value along the alpha sequence for radial stretches."""
import argparse

from qclip.bounds import boundary_reduction
from qclip.elliptic import identity_field
from qclip.errors import AlphaExhaustedError
from qclip.lab import radial_stretch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--K", type=float, nargs="+", default=[1.0, 1.5, 2.0, 2.1, 2.2, 3.0])
    ap.add_argument("--B", type=float, default=0.0)
    args = ap.parse_args()
    for K in args.K:
        try:
            red = boundary_reduction(radial_stretch(K), identity_field(), K, 0j, B=args.B)
            curve, status = red.curve, f"ok at alpha={red.alpha:.6f}"
        except AlphaExhaustedError as e:
            curve, status = e.curve, "alpha exhausted"
        print(f"K={K}: {status}")
        for alpha, M, value in curve:
            print(f"   alpha={alpha:.6f}  M={M:.3e}  value={value:.3e}")


if __name__ == "__main__":
    main()

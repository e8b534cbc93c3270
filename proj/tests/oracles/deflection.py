#!/usr/bin/env python3
"""First-order bending of light by the static spherical chart.

To first order in M the optical index is n = 1 + 2M/r and a ray at impact
parameter b bends by 4M/b in total.  Over the finite span |x| <= X the
accumulated first-order bend is (4M/b) * X / sqrt(X^2 + b^2).  Printed for
the test geometry b = 1, M = 1e-3, X = 50 (the integration window used by
the weak-field acceptance check).
"""
import mpmath as mp

mp.mp.dps = 30


def main():
    M, b, X = mp.mpf("1e-3"), mp.mpf(1), mp.mpf(50)
    full = 4 * M / b
    window = full * X / mp.sqrt(X * X + b * b)
    print(f"full_deflection    = {mp.nstr(full, 12)}")
    print(f"windowed (X = 50)  = {mp.nstr(window, 12)}")
    # Relative size of the next-order correction, (15*pi/16)*(M/b): keeping
    # the 1% acceptance window comfortable.
    second = 15 * mp.pi / 16 * (M / b)
    print(f"second_order/first = {mp.nstr(second, 6)}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Convergence study of the sliced path-integral propagator.

Prints the error of the N-slice oscillator kernel against the closed
form at a sample point, together with the fitted convergence order, and
checks that the free-particle kernel is reproduced to rounding at every
slice count.

Usage:
    python3 scripts/slicing_convergence.py
"""

import sys

import numpy as np

from tomoprop.greens import FREE, OSCILLATOR, green_free, green_oscillator, green_sliced


def main() -> int:
    x, y, t = 1.0, 0.0, 1.0
    counts = [8, 16, 32, 64, 128, 256, 512]
    exact = green_oscillator(x, y, t)
    errs = []
    print(f"oscillator kernel at (x, y, t) = ({x}, {y}, {t})")
    for n in counts:
        err = abs(green_sliced(OSCILLATOR, x, y, t, n) - exact)
        errs.append(err)
        print(f"  N = {n:4d}  error = {err:.6e}")
    slope = -np.polyfit(np.log(counts), np.log(errs), 1)[0]
    print(f"fitted order: {slope:.3f} (expected 1.0 from the endpoint potential rule)")

    worst = 0.0
    for n in (1, 3, 5, 50, 500):
        tt = 0.45 if n == 1 else 1.0
        worst = max(worst, abs(green_sliced(FREE, 0.7, -0.3, tt, n) - green_free(0.7, -0.3, tt)))
    print(f"free-particle slicing max error over N in {{1, 3, 5, 50, 500}}: {worst:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

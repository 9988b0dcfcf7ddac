"""Convergence of the matrix-element QSDE residual for the inverted oscillator.

Two-segment f and g on [0, 1), u = (1, 0.5, 0, ...), v = (0.3, 1, 0.2, 0, ...).
Prints nt, residual and the fitted log-log slope.

Usage: python3 scripts/qsde_convergence.py [--nt 125,250,500,1000] [--dim 12]
"""

import argparse
from fractions import Fraction

import numpy as np

from qsdcocycle import models
from qsdcocycle.cocycle import MatrixElementQuery, StepFunction, qsde_residual
from qsdcocycle.semigroup import SemigroupFamily


def two_segment(a, b):
    return StepFunction(((0, [a]), (Fraction(1, 2), [b])), "1")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nt", default="125,250,500,1000")
    p.add_argument("--dim", type=int, default=12)
    args = p.parse_args(argv)
    nts = [int(x) for x in args.nt.split(",")]
    F = models.iho(args.dim, "sqrt", "zero")
    u = np.zeros(args.dim, dtype=complex)
    v = np.zeros(args.dim, dtype=complex)
    u[:2] = [1.0, 0.5]
    v[:3] = [0.3, 1.0, 0.2]
    q = MatrixElementQuery(u, v, two_segment(0.7, -0.3 + 0.2j), two_segment(0.4j, 1.0), 1,
                           normalized=False)
    fam = SemigroupFamily(F)
    res = []
    print("nt,residual")
    for nt in nts:
        res.append(qsde_residual(F, q, nt, fam))
        print(f"{nt},{res[-1]:.6e}")
    if len(nts) > 1:
        slope = -np.polyfit(np.log(nts), np.log(res), 1)[0]
        print(f"# slope {slope:.3f}")


if __name__ == "__main__":
    main()

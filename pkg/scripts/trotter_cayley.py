"""Trotter-Kato study for the truncated Cayley shift generator.

Prints the error table for Q^{c,d} of the regularised generators against the
unregularised one, the sup error per n, and the worst form deficit of F^(n).

Usage: python3 scripts/trotter_cayley.py [--dim 16] [--nmax 256] [--out table.csv]
"""

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from qsdcocycle import models
from qsdcocycle.generator import max_form_deficit, regularize
from qsdcocycle.semigroup import trotter_study


@dataclass
class TrotterConfig:
    dim: int = 16
    nmax: int = 256
    c: float = 1.0
    d: float = 1.0
    tgrid: list = field(default_factory=lambda: [0.25, 0.5, 1.0])

    @property
    def schedule(self):
        out, n = [], 2
        while n <= self.nmax:
            out.append(n)
            n *= 2
        return out


def run(cfg: TrotterConfig, out=sys.stdout):
    F = models.cayley_shift(cfg.dim)
    study = trotter_study(F, cfg.schedule, [cfg.c], [cfg.d], cfg.tgrid, [np.eye(cfg.dim)[0]])
    study.write_csv(out)
    print("# n  sup_error  form_deficit(F^(n))", file=sys.stderr)
    for n in cfg.schedule:
        print(f"# {n:4d}  {study.sup_error(n):.6e}  {max_form_deficit(regularize(F, n)):.2e}",
              file=sys.stderr)
    ratio = study.sup_error(cfg.schedule[-1]) / study.sup_error(cfg.schedule[0])
    print(f"# error({cfg.schedule[-1]}) / error({cfg.schedule[0]}) = {ratio:.4f}", file=sys.stderr)
    return study


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--nmax", type=int, default=256)
    p.add_argument("--out")
    args = p.parse_args(argv)
    cfg = TrotterConfig(dim=args.dim, nmax=args.nmax)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            run(cfg, fh)
    else:
        run(cfg)


if __name__ == "__main__":
    main()

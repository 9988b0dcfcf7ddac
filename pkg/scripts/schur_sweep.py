"""Schur admissibility sweep over the model zoo.

Runs seeded random trials of the Schur-product criterion for each model and
reports violations and the smallest margin. The SHG model built with the
verbatim K sign (which breaks the form inequality) is included for contrast.

Usage: python3 scripts/schur_sweep.py [--trials 200] [--seed 42] [--tmax 2]
"""

import argparse

import numpy as np

from qsdcocycle import models
from qsdcocycle.generator import max_form_deficit
from qsdcocycle.semigroup import SemigroupFamily, random_schur_trial, schur_criterion

ZOO = {
    "cayley16": lambda: models.cayley_shift(16),
    "iho12": lambda: models.iho(12, "sqrt", "zero"),
    "bd21": lambda: models.birth_death(21, "const:1", "zero"),
    "shg8x8": lambda: models.shg(8, 8),
    "shg4x4_verbatim_sign": lambda: models.shg(4, 4, k_sign="verbatim"),
}


def sweep(F, trials, seed, n_max=3, t_max=2.0, tol=1e-10):
    fam = SemigroupFamily(F)
    rng = np.random.default_rng(seed)
    violations, worst = 0, np.inf
    for _ in range(trials):
        A, B, Y, cs, t = random_schur_trial(rng, fam, n_max, t_max)
        holds, margin = schur_criterion(fam, A, B, Y, cs, t, tol)
        violations += not holds
        worst = min(worst, margin)
    return violations, worst


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--nmax", type=int, default=3)
    p.add_argument("--tmax", type=float, default=2.0)
    args = p.parse_args(argv)
    print("model,form_deficit,violations,min_margin")
    for name, build in ZOO.items():
        F = build()
        v, worst = sweep(F, args.trials, args.seed, args.nmax, args.tmax)
        print(f"{name},{max_form_deficit(F):.3e},{v},{worst:.6e}")


if __name__ == "__main__":
    main()

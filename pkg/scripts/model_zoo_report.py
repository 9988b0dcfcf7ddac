"""Diagnostics for the built-in models at their default sizes.

For each model prints the form deficit, the interior isometry defect, the
conservativity defect of the semigroup on I (full and interior) and the
smallest Choi eigenvalue where the Choi matrix is affordable.

Usage: python3 scripts/model_zoo_report.py [--t 1.0] [--out report.json]
"""

import argparse
import json
import sys

from qsdcocycle import models
from qsdcocycle.generator import isometry_defect, max_form_deficit
from qsdcocycle.qds import CHOI_MAX_DIM, conservativity_defect, cp_check

ZOO = {
    "cayley16": lambda: models.cayley_shift(16),
    "iho12": lambda: models.iho(12, "sqrt", "zero"),
    "iho12_oddsqrt": lambda: models.iho(12, "odd-sqrt", "zero"),
    "bd21": lambda: models.birth_death(21, "const:1", "zero"),
    "shg5x5": lambda: models.shg(5, 5),
    "shg8x8": lambda: models.shg(8, 8),
    "shg8x8_verbatim_sign": lambda: models.shg(8, 8, k_sign="verbatim"),
}
MARGINS = {"cayley": 2, "iho": 2, "bd": 2, "shg": 3}


def margin_for(name):
    return next(v for k, v in MARGINS.items() if name.startswith(k))


def report(t=1.0):
    rows = {}
    for name, build in ZOO.items():
        F = build()
        margin = margin_for(name)
        mask = F.interior_mask(margin)
        rows[name] = {
            "h_dim": F.h_dim,
            "noise_dim": F.noise_dim,
            "margin": margin,
            "max_form_deficit": max_form_deficit(F),
            "isometry_defect": isometry_defect(F),
            "interior_isometry_defect": isometry_defect(F, mask),
            "conservativity_defect": conservativity_defect(F, t)[0],
            "interior_conservativity_defect": conservativity_defect(F, t, margin=margin)[0],
            # Choi eigenvalues beyond m = 25 are slow on one core
            "min_choi_eig": cp_check(F, t) if F.h_dim <= min(25, CHOI_MAX_DIM) else None,
        }
        print(f"{name:22s} " + "  ".join(
            f"{k}={v:.2e}" for k, v in rows[name].items() if isinstance(v, float)),
            file=sys.stderr)
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--out")
    args = p.parse_args(argv)
    text = json.dumps({"t": args.t, "models": report(args.t)}, indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


if __name__ == "__main__":
    main()

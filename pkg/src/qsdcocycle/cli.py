"""Command line interface.

Exit codes: 0 when the checked property holds, 1 when it is violated, 2 on
unreadable or invalid input.
"""

import argparse
import contextlib
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io, models
from .cocycle import MatrixElementQuery, reconstruct
from .generator import DEFAULT_TOL, diagnostics, max_form_deficit
from .numerics import herm_max_eig, op_norm
from .qds import CHOI_MAX_DIM, DENSE_MAX_DIM, conservativity_defect, cp_check, qds_evolve
from .semigroup import SemigroupFamily, generator_cd, random_schur_trial, schur_criterion, trotter_study

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _decimal(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}")


def positive_decimal(text: str) -> Fraction:
    x = _decimal(text)
    if x <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return x


def nonneg_decimal(text: str) -> Fraction:
    x = _decimal(text)
    if x < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return x


def positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return n


def nonneg_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return n


def decimal_list(text: str) -> list[Fraction]:
    return [nonneg_decimal(x) for x in text.split(",") if x.strip()]


def int_list(text: str) -> list[int]:
    return [positive_int(x) for x in text.split(",") if x.strip()]


def vector_arg(text: str) -> np.ndarray:
    """A vector file path, or comma separated complex literals such as ``1,0.5j``."""
    if Path(text).is_file():
        return io.load_vector(text)
    try:
        return np.array([complex(x.replace(" ", "")) for x in text.split(",") if x.strip()],
                        dtype=complex)
    except ValueError:
        raise io.InputError(f"cannot read vector {text!r} (not a file or complex list)")


def _emit_json(obj, out) -> None:
    text = json.dumps(obj, indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _open_out(out):
    return open(out, "w", newline="") if out else contextlib.nullcontext(sys.stdout)


def _coefficient(text):
    if text is None:
        return None
    if text.startswith("table:"):
        path = text[len("table:"):]
        obj = io._read(path)
        values = io.parse_vector(io._field(obj, "values", path), f"{path}: field 'values'")
        return models.CoefficientFunction.table(values, int(obj.get("offset", 0)))
    return models.CoefficientFunction.parse(text)


def cmd_model(args) -> int:
    perm1 = io.load_permutation(args.perm1) if args.perm1 else None
    perm2 = io.load_permutation(args.perm2) if args.perm2 else None
    F = models.build(args.name, args.dim, args.dim2, _coefficient(args.lam), _coefficient(args.mu),
                     float(args.omega), float(args.coupling), perm1, perm2, args.k_sign)
    obj = io.generator_to_json(F)
    _emit_json(obj, args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    F = io.load_generator(args.generator)
    report = diagnostics(F, float(args.tol), args.margin, args.seed)
    _emit_json(report.to_json(), args.out)
    return EXIT_OK if report.verdicts["form_inequality"] else EXIT_VIOLATION


def cmd_semigroup(args) -> int:
    F = io.load_generator(args.generator)
    G = generator_cd(F, args.c, args.d)
    Q = SemigroupFamily(F).evolve(args.c, args.d, float(args.t))
    diss = herm_max_eig(G)
    norm = op_norm(Q)
    _emit_json({
        "c": io.vector_to_json(args.c), "d": io.vector_to_json(args.d), "t": str(args.t),
        "dissipativity": diss, "op_norm": norm,
        "generator": io.matrix_to_json(G), "Q": io.matrix_to_json(Q),
    }, args.out)
    tol = float(args.tol)
    return EXIT_VIOLATION if diss <= tol and norm > 1.0 + tol else EXIT_OK


def cmd_reconstruct(args) -> int:
    F = io.load_generator(args.generator)
    fam = SemigroupFamily(F)
    u, v = io.load_vector(args.u), io.load_vector(args.v)
    f, g = io.load_step_function(args.f), io.load_step_function(args.g)
    q = MatrixElementQuery(u, v, f, g, args.t, normalized=not args.unnormalized)
    value = reconstruct(fam, q)
    sys.stdout.write(json.dumps(io.complex_to_json(value)) + "\n")
    if args.trace:
        with _open_out(args.trace) as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(["t", "re", "im"])
            steps = args.trace_steps
            for k in range(steps + 1):
                s = q.t * Fraction(k, steps)
                z = reconstruct(fam, MatrixElementQuery(u, v, f, g, s, q.normalized))
                writer.writerow([f"{float(s):.17g}", f"{z.real:.17g}", f"{z.imag:.17g}"])
    tol = float(args.tol)
    bound = np.linalg.norm(u) * np.linalg.norm(v)
    if q.normalized and max_form_deficit(F) <= tol and abs(value) > bound + tol:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_trotter(args) -> int:
    F = io.load_generator(args.generator)
    if max_form_deficit(F) > float(args.tol):
        sys.stderr.write("generator violates the form inequality; cannot regularise\n")
        return EXIT_VIOLATION
    probes = [io.load_vector(p) for p in args.probe] or [np.eye(F.h_dim)[0]]
    study = trotter_study(F, args.schedule, args.c, args.d, [float(t) for t in args.tgrid],
                          probes, float(args.tol))
    with _open_out(args.out) as stream:
        study.write_csv(stream)
    return EXIT_OK


def cmd_qds(args) -> int:
    F = io.load_generator(args.generator)
    tol = float(args.tol)
    contractive = max_form_deficit(F) <= tol
    grid = [args.tmax * Fraction(k, args.steps) for k in range(args.steps + 1)] if args.steps else []
    ok = True
    ident = np.eye(F.h_dim)
    with _open_out(args.out) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["t", "defect", "min_diag_defect_index", "min_choi_eig"])
        for t in grid:
            t = float(t)
            defect, diag = conservativity_defect(F, t)
            # index where T_t(I) has its smallest diagonal entry (largest vacuum mass loss)
            index = int(np.argmax(diag))
            if F.h_dim <= args.choi_max_dim:
                choi = cp_check(F, t)
                ok &= choi >= -tol
                choi_text = f"{choi:.17g}"
            else:
                choi_text = "nan"
            if contractive:
                ok &= herm_max_eig(qds_evolve(F, ident, t) - ident) <= tol
            writer.writerow([f"{t:.17g}", f"{defect:.17g}", index, choi_text])
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_schur(args) -> int:
    F = io.load_generator(args.generator)
    fam = SemigroupFamily(F)
    rng = np.random.default_rng(args.seed)
    tol = float(args.tol)
    violations, worst = 0, float("inf")
    for _ in range(args.trials):
        A, B, Y, cs, t = random_schur_trial(rng, fam, args.nmax, float(args.tmax))
        holds, margin = schur_criterion(fam, A, B, Y, cs, t, tol)
        violations += not holds
        worst = min(worst, margin)
    _emit_json({"trials": args.trials, "seed": args.seed, "violations": violations,
                "min_margin": worst if args.trials else None}, args.out)
    return EXIT_OK if violations == 0 else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsdcocycle",
        description="Semigroup construction of quantum stochastic cocycles on truncated spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tol(p):
        p.add_argument("--tol", type=positive_decimal, default=Fraction(str(DEFAULT_TOL)),
                       help="verdict tolerance (dimensionless, default 1e-10)")

    p = sub.add_parser("model", help="write a built-in example generator")
    p.add_argument("--name", required=True, choices=["cayley", "iho", "bd", "shg"])
    p.add_argument("--dim", type=positive_int, required=True,
                   help="truncation size (basis vectors; window size for bd; first mode for shg)")
    p.add_argument("--dim2", type=positive_int, help="second-mode truncation for shg (default --dim)")
    p.add_argument("--lambda", dest="lam",
                   help="coefficient lambda: zero, sqrt, abs-sqrt, odd-sqrt, const:x, linear:a,b "
                        "or table:FILE (iho, bd)")
    p.add_argument("--mu", help="coefficient mu, same syntax as --lambda (iho, bd)")
    p.add_argument("--omega", type=_decimal, default=Fraction(1), help="shg drive strength omega")
    p.add_argument("--coupling", type=_decimal, default=Fraction(1, 2), help="shg coupling lambda")
    p.add_argument("--perm1", help="shg: JSON file with a basis permutation for V1")
    p.add_argument("--perm2", help="shg: JSON file with a basis permutation for V2")
    p.add_argument("--k-sign", default="dissipative", choices=["dissipative", "verbatim"],
                   help="shg: sign of the number term in K")
    p.add_argument("--out", help="output generator file (default stdout)")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("validate", help="check the form inequality and report diagnostics")
    p.add_argument("generator")
    add_tol(p)
    p.add_argument("--margin", type=nonneg_int, default=None,
                   help="interior margin in basis indices for the isometry defect")
    p.add_argument("--seed", type=int, required=True, help="seed for random probe vectors")
    p.add_argument("--out", help="report file (default stdout)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("semigroup", help="evaluate Q^{c,d}_t")
    p.add_argument("generator")
    p.add_argument("--c", type=vector_arg, required=True, help="vector file or list like 1,0.5j")
    p.add_argument("--d", type=vector_arg, required=True, help="vector file or list like 1,0.5j")
    p.add_argument("--t", type=nonneg_decimal, required=True, help="time (dimensionless)")
    add_tol(p)
    p.add_argument("--out", help="output JSON (default stdout)")
    p.set_defaults(func=cmd_semigroup)

    p = sub.add_parser("reconstruct", help="cocycle matrix element on exponential vectors")
    p.add_argument("generator")
    for name in ("u", "v"):
        p.add_argument(f"--{name}", required=True, help=f"vector file for {name}")
    for name in ("f", "g"):
        p.add_argument(f"--{name}", required=True, help=f"step function file for {name}")
    p.add_argument("--t", type=nonneg_decimal, required=True, help="time (dimensionless)")
    p.add_argument("--unnormalized", action="store_true",
                   help="use exponential instead of normalised exponential vectors")
    p.add_argument("--trace", help="also write CSV t,re,im on a grid over [0, t]")
    p.add_argument("--trace-steps", type=positive_int, default=16, help="trace grid intervals")
    add_tol(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("trotter", help="convergence of regularised semigroups")
    p.add_argument("generator")
    p.add_argument("--schedule", type=int_list, default=[2 ** k for k in range(1, 9)],
                   help="increasing regularisation indices (default 2,4,...,256)")
    p.add_argument("--c", type=vector_arg, required=True)
    p.add_argument("--d", type=vector_arg, required=True)
    p.add_argument("--tgrid", type=decimal_list, default=[Fraction(1, 4), Fraction(1, 2), Fraction(1)],
                   help="comma separated times (default 0.25,0.5,1)")
    p.add_argument("--probe", action="append", default=[], help="probe vector file (repeatable; default e_0)")
    add_tol(p)
    p.add_argument("--out", help="CSV n,t,error (default stdout)")
    p.set_defaults(func=cmd_trotter)

    p = sub.add_parser("qds", help="conservativity and complete positivity of the vacuum semigroup")
    p.add_argument("generator")
    p.add_argument("--tmax", type=nonneg_decimal, default=Fraction(5), help="final time (default 5)")
    p.add_argument("--steps", type=nonneg_int, default=10,
                   help="grid intervals on [0, tmax]; 0 writes only the header")
    p.add_argument("--choi-max-dim", type=positive_int, default=DENSE_MAX_DIM,
                   help=f"largest h_dim for the Choi column (at most {CHOI_MAX_DIM}); larger writes nan")
    add_tol(p)
    p.add_argument("--out", help="CSV t,defect,min_diag_defect_index,min_choi_eig (default stdout)")
    p.set_defaults(func=cmd_qds)

    p = sub.add_parser("schur", help="randomised check of the Schur-product admissibility inequality")
    p.add_argument("generator")
    p.add_argument("--trials", type=nonneg_int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--nmax", type=positive_int, default=3, help="largest matrix size n")
    p.add_argument("--tmax", type=nonneg_decimal, default=Fraction(2), help="largest sampled time")
    add_tol(p)
    p.add_argument("--out", help="summary JSON (default stdout)")
    p.set_defaults(func=cmd_schur)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "choi_max_dim", 0) > CHOI_MAX_DIM:
        parser.error(f"--choi-max-dim must be at most {CHOI_MAX_DIM}")
    try:
        return args.func(args)
    except (io.InputError, ValueError, KeyError, IndexError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

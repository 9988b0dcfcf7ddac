"""Write the example input files in data/ used by the README and the CLI tests.

Usage: python3 scripts/make_example_data.py [outdir]
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from qsdcocycle import io, models
from qsdcocycle.cocycle import StepFunction
from qsdcocycle.generator import GeneratorMatrix


def main(outdir: str = "data") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)

    generators = {
        "cayley16": models.cayley_shift(16),
        "iho12": models.iho(12, "sqrt", "zero"),
        "iho12_oddsqrt": models.iho(12, "odd-sqrt", "zero"),
        "bd21": models.birth_death(21, "const:1", "zero"),
        "shg8x8": models.shg(8, 8, 1.0, 0.5),
        "shg4x4": models.shg(4, 4, 1.0, 0.5),
        "zero3": GeneratorMatrix.zeros(3, 1),
    }
    for name, F in generators.items():
        io.save_generator(F, out / f"{name}.json")

    u = np.zeros(12, dtype=complex)
    v = np.zeros(12, dtype=complex)
    u[:2] = [1.0, 0.5]
    v[:3] = [0.3, 1.0, 0.2]
    io.save_json({"entries": io.vector_to_json(u)}, out / "u12.json")
    io.save_json({"entries": io.vector_to_json(v)}, out / "v12.json")
    io.save_json({"entries": io.vector_to_json(np.eye(16)[0])}, out / "e0_16.json")
    io.save_json({"entries": io.vector_to_json([1.0])}, out / "one.json")

    half = Fraction(1, 2)
    f = StepFunction(((0, [0.7]), (half, [-0.3 + 0.2j])), "1")
    g = StepFunction(((0, [0.4j]), (half, [1.0])), "1")
    io.save_json(io.step_function_to_json(f), out / "f_two_segment.json")
    io.save_json(io.step_function_to_json(g), out / "g_two_segment.json")

    # swaps the two photon modes of the 8 x 8 grid
    swap = [j * 8 + i for i in range(8) for j in range(8)]
    io.save_json(swap, out / "perm_swap_8x8.json")
    io.save_json({"values": io.vector_to_json(np.sqrt(np.arange(13))), "offset": 0},
                 out / "lambda_table.json")


if __name__ == "__main__":
    main(*sys.argv[1:])

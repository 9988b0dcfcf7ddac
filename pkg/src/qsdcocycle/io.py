"""JSON file formats.

Complex numbers are ``[re, im]`` pairs everywhere. Times are decimal strings
so they convert to exact rationals.

* generator: ``{"h_dim": m, "noise_dim": d, "blocks": [[M_ab, ...], ...]}``
  with each ``M_ab`` a row-major nested array; an optional ``"geometry"``
  entry ``{"kind": ..., "shape": [...]}`` records the basis layout.
* vector: ``{"entries": [[re, im], ...]}``
* step function: ``{"T": "2.0", "segments": [{"t0": "0", "value": [[re, im], ...]}, ...]}``;
  ``"p/q"`` strings are also accepted for non-terminating rationals
* permutation: ``[p_0, p_1, ...]``
"""

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .cocycle import StepFunction
from .generator import GeneratorMatrix, NoiseBasis
from .truncation import Geometry


class InputError(ValueError):
    """Malformed input file; the message names the offending field."""


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(M) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(M)]


def vector_to_json(v) -> list:
    return [complex_to_json(z) for z in np.asarray(v).reshape(-1)]


def parse_complex(obj, where: str) -> complex:
    if (not isinstance(obj, (list, tuple)) or len(obj) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)):
        raise InputError(f"{where}: expected [re, im], got {obj!r}")
    z = complex(obj[0], obj[1])
    if not np.isfinite(z):
        raise InputError(f"{where}: non-finite value")
    return z


def parse_vector(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list):
        raise InputError(f"{where}: expected a list of [re, im] pairs")
    return np.array([parse_complex(z, f"{where}[{k}]") for k, z in enumerate(obj)], dtype=complex)


def parse_matrix(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise InputError(f"{where}: expected a non-empty list of rows")
    rows = [parse_vector(row, f"{where}[{r}]") for r, row in enumerate(obj)]
    if len({len(r) for r in rows}) != 1:
        raise InputError(f"{where}: rows have differing lengths")
    return np.array(rows)


def parse_time(obj, where: str) -> Fraction:
    if not isinstance(obj, str):
        raise InputError(f"{where}: times must be decimal strings, got {obj!r}")
    try:
        return Fraction(obj)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: cannot parse time {obj!r}") from exc


def time_to_text(x: Fraction) -> str:
    """Exact decimal string for a terminating rational, ``"p/q"`` otherwise."""
    x = Fraction(x)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    places = max(twos, fives)
    scaled = x.numerator * 10 ** places // x.denominator
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    if places == 0:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def _read(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg})") from exc


def _field(obj, key, path):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{path}: missing field {key!r}")
    return obj[key]


def generator_to_json(F: GeneratorMatrix) -> dict:
    k = F.basis.augmented_dim
    out = {
        "h_dim": F.h_dim,
        "noise_dim": F.noise_dim,
        "blocks": [[matrix_to_json(F.block(a, b)) for b in range(k)] for a in range(k)],
    }
    if F.geometry is not None:
        out["geometry"] = F.geometry.to_json()
    return out


def generator_from_json(obj, path: str = "<generator>") -> GeneratorMatrix:
    m = _field(obj, "h_dim", path)
    d = _field(obj, "noise_dim", path)
    blocks = _field(obj, "blocks", path)
    if not isinstance(m, int) or m <= 0:
        raise InputError(f"{path}: field 'h_dim' must be a positive integer")
    if not isinstance(d, int) or d < 0:
        raise InputError(f"{path}: field 'noise_dim' must be a non-negative integer")
    if not isinstance(blocks, list) or len(blocks) != d + 1:
        raise InputError(f"{path}: field 'blocks' must have noise_dim + 1 = {d + 1} rows")
    parsed = []
    for a, row in enumerate(blocks):
        if not isinstance(row, list) or len(row) != d + 1:
            raise InputError(f"{path}: field 'blocks[{a}]' must have {d + 1} entries")
        parsed_row = []
        for b, M in enumerate(row):
            where = f"{path}: field 'blocks[{a}][{b}]'"
            M = parse_matrix(M, where)
            if M.shape != (m, m):
                raise InputError(f"{where} has shape {M.shape}, expected ({m}, {m})")
            parsed_row.append(M)
        parsed.append(parsed_row)
    geometry = None
    if "geometry" in obj:
        try:
            geometry = Geometry.from_json(obj["geometry"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}: field 'geometry' is invalid ({exc})") from exc
        if geometry.dim != m:
            raise InputError(f"{path}: field 'geometry' does not match h_dim")
    return GeneratorMatrix(m, NoiseBasis(d), np.block(parsed), geometry)


def load_generator(path) -> GeneratorMatrix:
    return generator_from_json(_read(path), str(path))


def save_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, separators=(",", ":")) + "\n")


def save_generator(F: GeneratorMatrix, path) -> None:
    save_json(generator_to_json(F), path)


def load_vector(path) -> np.ndarray:
    obj = _read(path)
    return parse_vector(_field(obj, "entries", path), f"{path}: field 'entries'")


def step_function_to_json(f: StepFunction) -> dict:
    return {"T": time_to_text(f.T), "segments": [{"t0": time_to_text(s), "value": vector_to_json(v)}
                                        for s, v in f.segments]}


def step_function_from_json(obj, path: str = "<step function>") -> StepFunction:
    T = parse_time(_field(obj, "T", path), f"{path}: field 'T'")
    segs = _field(obj, "segments", path)
    if not isinstance(segs, list) or not segs:
        raise InputError(f"{path}: field 'segments' must be a non-empty list")
    parsed = []
    for k, seg in enumerate(segs):
        where = f"{path}: field 'segments[{k}]'"
        parsed.append((parse_time(_field(seg, "t0", where), f"{where}.t0"),
                       parse_vector(_field(seg, "value", where), f"{where}.value")))
    try:
        return StepFunction(tuple(parsed), T)
    except ValueError as exc:
        raise InputError(f"{path}: field 'segments' is invalid ({exc})") from exc


def load_step_function(path) -> StepFunction:
    return step_function_from_json(_read(path), str(path))


def load_permutation(path) -> list[int]:
    obj = _read(path)
    if not isinstance(obj, list) or not all(isinstance(p, int) for p in obj):
        raise InputError(f"{path}: expected a JSON array of integers")
    return obj

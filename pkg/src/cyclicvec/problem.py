"""Problem specification files (JSON).

    {
      "spectrum":     {"kind": "integer-line"}
                    | {"kind": "affine", "a": 2, "b": 1}
                    | {"kind": "table", "values": [...2J+1 increasing numbers...]},
      "coefficients": {"kind": "geometric", "ratio": 0.5, "scale": 1, "phase_seed": 7,
                       "zero_indices": [2]}
                    | {"kind": "exp-cos", "a": 1.0, "zero_indices": []}
                    | {"kind": "table", "values": [...], "offset": -J}
                    | {"kind": "quadrature", "grid": [...], "kmax": 32}
                    | {"kind": "quadrature", "function": "bump", "radius": 2.5, "kmax": 48},
      "precision":    {"mantissa_bits": 256, "tail_rel_tol": 1e-30,
                       "solve_rel_tol": 1e-25, "gram_mantissa_bits": 512}
    }

Numbers may be given as JSON numbers or decimal strings; complex table
entries as [re, im]. Unknown fields are rejected.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from mpmath import mp

from .derivative_app import PeriodicFunctionSpec, expcos_coefficients, quadrature_coefficients
from .errors import SpecError
from .spectral_core import (
    AffineInteger,
    CoefficientSequence,
    ExplicitTable,
    GeometricCoefficients,
    IntegerLine,
    MaskedCoefficients,
    PrecisionConfig,
    Spectrum,
    TableCoefficients,
)

_TOP = {"spectrum", "coefficients", "precision"}
_SPECTRUM = {
    "integer-line": set(),
    "affine": {"a", "b"},
    "table": {"values"},
}
_COEFFS = {
    "geometric": {"ratio", "scale", "phase_seed", "zero_indices"},
    "exp-cos": {"a", "zero_indices"},
    "table": {"values", "offset"},
    "quadrature": {"grid", "function", "radius", "kmax"},
}
_PRECISION = {"mantissa_bits", "tail_rel_tol", "solve_rel_tol", "gram_mantissa_bits"}


@dataclass(frozen=True)
class Problem:
    spectrum: Spectrum
    coeffs: CoefficientSequence
    precision: PrecisionConfig
    raw: dict


def _check_fields(section: str, obj: Any, allowed: set, required: set = frozenset()):
    if not isinstance(obj, dict):
        raise SpecError(f"{section} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise SpecError(f"unknown field(s) in {section}: {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise SpecError(f"missing field(s) in {section}: {sorted(missing)}")


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise SpecError(f"{where}: expected a number or decimal string, got {x!r}")
    if isinstance(x, str):
        try:
            mp.mpf(x)
        except (ValueError, TypeError):
            raise SpecError(f"{where}: not a number: {x!r}") from None
    return x


def _scalar(x, where):
    if isinstance(x, list):
        if len(x) != 2:
            raise SpecError(f"{where}: complex values are [re, im]")
        return (_number(x[0], where), _number(x[1], where))
    return _number(x, where)


def parse_spectrum(obj) -> Spectrum:
    _check_fields("spectrum", obj, {"kind"} | set().union(*_SPECTRUM.values()), {"kind"})
    kind = obj["kind"]
    if kind not in _SPECTRUM:
        raise SpecError(f"unknown spectrum kind {kind!r}")
    _check_fields(f"spectrum ({kind})", obj, {"kind"} | _SPECTRUM[kind], _SPECTRUM[kind] - {"b"})
    if kind == "integer-line":
        return IntegerLine()
    if kind == "affine":
        return AffineInteger(a=_number(obj["a"], "spectrum.a"), b=_number(obj.get("b", 0), "spectrum.b"))
    vals = obj["values"]
    if not isinstance(vals, list):
        raise SpecError("spectrum.values must be a list")
    return ExplicitTable(values=tuple(_number(v, "spectrum.values") for v in vals))


def parse_coefficients(obj, cfg: PrecisionConfig) -> CoefficientSequence:
    _check_fields("coefficients", obj, {"kind"} | set().union(*_COEFFS.values()), {"kind"})
    kind = obj["kind"]
    if kind not in _COEFFS:
        raise SpecError(f"unknown coefficients kind {kind!r}")
    _check_fields(f"coefficients ({kind})", obj, {"kind"} | _COEFFS[kind])
    zeros = obj.get("zero_indices")
    if zeros is not None and not all(isinstance(z, int) and not isinstance(z, bool) for z in zeros):
        raise SpecError("zero_indices must be a list of integers")

    if kind == "geometric":
        if "ratio" not in obj:
            raise SpecError("geometric coefficients need 'ratio'")
        seed = obj.get("phase_seed")
        if seed is not None and (not isinstance(seed, int) or seed < 0):
            raise SpecError("phase_seed must be a nonnegative integer")
        seq = GeometricCoefficients(
            ratio=_number(obj["ratio"], "coefficients.ratio"),
            scale=_scalar(obj.get("scale", 1), "coefficients.scale"),
            phase_seed=seed,
        )
    elif kind == "exp-cos":
        if "a" not in obj:
            raise SpecError("exp-cos coefficients need 'a'")
        seq = expcos_coefficients(_number(obj["a"], "coefficients.a"))
    elif kind == "table":
        vals = obj.get("values")
        if not isinstance(vals, list) or not vals:
            raise SpecError("coefficients.values must be a nonempty list")
        vals = tuple(_scalar(v, "coefficients.values") for v in vals)
        offset = obj.get("offset")
        if offset is None:
            seq = TableCoefficients.centered(vals)
        else:
            if not isinstance(offset, int):
                raise SpecError("coefficients.offset must be an integer")
            seq = TableCoefficients(values=vals, offset=offset)
    else:
        if ("grid" in obj) == ("function" in obj):
            raise SpecError("quadrature coefficients need exactly one of 'grid' or 'function'")
        if "grid" in obj:
            grid = obj["grid"]
            if not isinstance(grid, list):
                raise SpecError("coefficients.grid must be a list")
            fspec = PeriodicFunctionSpec("grid", values=tuple(_number(v, "grid") for v in grid))
            default_kmax = len(fspec.values) // 4
        else:
            if obj["function"] != "bump":
                raise SpecError("quadrature 'function' supports only 'bump'")
            r = obj.get("radius")
            fspec = PeriodicFunctionSpec.bump(_number(r, "radius") if r is not None else None)
            default_kmax = 48
        kmax = obj.get("kmax", default_kmax)
        if not isinstance(kmax, int) or kmax < 1:
            raise SpecError("kmax must be a positive integer")
        seq = quadrature_coefficients(fspec, kmax, cfg)
    if zeros:
        seq = MaskedCoefficients(base=seq, zero_indices=frozenset(zeros))
    return seq


def parse_precision(obj) -> PrecisionConfig:
    if obj is None:
        return PrecisionConfig()
    _check_fields("precision", obj, _PRECISION)
    kw = {}
    for key in ("mantissa_bits", "gram_mantissa_bits"):
        if key in obj:
            if not isinstance(obj[key], int) or isinstance(obj[key], bool):
                raise SpecError(f"precision.{key} must be an integer")
            kw[key] = obj[key]
    for key in ("tail_rel_tol", "solve_rel_tol"):
        if key in obj:
            kw[key] = float(_number(obj[key], f"precision.{key}"))
    try:
        return PrecisionConfig(**kw)
    except ValueError as exc:
        raise SpecError(str(exc)) from None


def parse_problem(obj: dict, precision_override: int | None = None) -> Problem:
    _check_fields("problem", obj, _TOP, {"spectrum", "coefficients"})
    cfg = parse_precision(obj.get("precision"))
    if precision_override is not None:
        cfg = PrecisionConfig(
            mantissa_bits=precision_override,
            tail_rel_tol=cfg.tail_rel_tol,
            solve_rel_tol=cfg.solve_rel_tol,
            gram_mantissa_bits=cfg.gram_mantissa_bits,
        )
    spectrum = parse_spectrum(obj["spectrum"])
    coeffs = parse_coefficients(obj["coefficients"], cfg)
    return Problem(spectrum, coeffs, cfg, obj)


def load_problem(path, precision_override: int | None = None) -> Problem:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read problem file {path}: {exc}") from None
    return parse_problem(obj, precision_override)

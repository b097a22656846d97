"""JSON and CSV serialization, run configuration, and result emission.

Generator files are JSON objects::

    {"dimension": 2, "kind": "discrete", "atoms": [[2, 0], [0, 2]], "probs": [0.5, 0.5]}
    {"dimension": 2, "kind": "sampler", "sampler": {"name": "independent_uniform_2u"}, "bound": 2}

Rational values that are not exactly representable as floats are written as
``"p/q"`` strings, so a discrete generator survives a round trip exactly.
Two composite sampler names are understood besides the built-in registry:
``"product"`` (params ``{"factors": [spec, ...]}``) and ``"truncated"``
(params ``{"c": c, "mu": [...], "base": spec}``).
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .generators import (
    SAMPLERS,
    DiscreteGenerator,
    GeneratorError,
    ProductSampler,
    SamplerGenerator,
    ValidationReport,
    _DiscreteSampler,
    product_sampler,
    truncate_normalize,
    validate_generator,
)
from .oracles import DiscreteScalarLaw

__all__ = [
    "SpecError",
    "ValidationFailed",
    "generator_to_dict",
    "generator_from_dict",
    "parse_generator_file",
    "write_generator_file",
    "law_from_dict",
    "parse_law_file",
    "format_float",
    "dumps",
    "write_csv",
    "read_samples_csv",
    "emit_results",
    "RunConfig",
    "SEED_ENV",
]

SEED_ENV = "DNORM_SEED"


class SpecError(GeneratorError):
    """A generator or law file could not be parsed."""


class ValidationFailed(SpecError):
    def __init__(self, report: ValidationReport, source: str = "generator"):
        self.report = report
        super().__init__(f"{source} failed validation:\n{report}")


# --- generators <-> dicts ----------------------------------------------------------


def _number(f: Fraction):
    if f.denominator == 1 and abs(f.numerator) < 2**53:
        return int(f.numerator)
    as_float = float(f)
    if Fraction(as_float) == f:
        return as_float
    return f"{f.numerator}/{f.denominator}"


def generator_to_dict(g) -> dict:
    """Serializable description of ``g``; the inverse of :func:`generator_from_dict`."""
    if isinstance(g, DiscreteGenerator):
        return {
            "dimension": g.dimension,
            "kind": "discrete",
            "atoms": [[_number(v) for v in row] for row in g.exact_atoms()],
            "probs": [_number(p) for p in g.exact_probs()],
            "bound": g.bound,
        }
    if isinstance(g, _DiscreteSampler):
        return generator_to_dict(g.discrete)
    if not isinstance(g, SamplerGenerator):
        raise TypeError(f"not a generator: {g!r}")
    if isinstance(g, ProductSampler):
        sampler = {"name": "product",
                   "params": {"factors": [generator_to_dict(f) for f in g.factors]}}
    elif g.name == "truncated":
        sampler = {"name": "truncated",
                   "params": {"c": g.params["c"], "mu": list(g.params["mu"]),
                              "base": generator_to_dict(g.base)}}
    elif g.name in SAMPLERS:
        sampler = {"name": g.name, "params": dict(g.params)}
    else:
        raise SpecError(f"sampler {g.name or 'custom'!r} has no JSON form")
    return {"dimension": g.dimension, "kind": "sampler", "sampler": sampler, "bound": g.bound}


def _require(obj: Mapping, key: str, where: str):
    if key not in obj:
        raise SpecError(f"{where}: missing field {key!r}")
    return obj[key]


def _rational(v, where: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise SpecError(f"{where}: expected a number or 'p/q' string, got {v!r}")
    try:
        f = Fraction(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"{where}: bad number {v!r}") from exc
    return f


def _dimension(obj: Mapping, where: str) -> int:
    d = _require(obj, "dimension", where)
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise SpecError(f"{where}: dimension must be a positive integer, got {d!r}")
    return d


def generator_from_dict(obj: Mapping, where: str = "generator"):
    """Build and validate a generator from its JSON description."""
    if not isinstance(obj, Mapping):
        raise SpecError(f"{where}: expected a JSON object")
    d = _dimension(obj, where)
    kind = _require(obj, "kind", where)
    if kind == "discrete":
        atoms = _require(obj, "atoms", where)
        probs = _require(obj, "probs", where)
        if not isinstance(atoms, list) or not isinstance(probs, list) or not atoms:
            raise SpecError(f"{where}: atoms and probs must be nonempty lists")
        if len(atoms) != len(probs):
            raise SpecError(f"{where}: {len(atoms)} atoms but {len(probs)} probabilities")
        rows = []
        for k, row in enumerate(atoms):
            if not isinstance(row, list) or len(row) != d:
                raise SpecError(f"{where}: atom {k + 1} does not have length {d}")
            rows.append([_rational(v, f"{where}: atom {k + 1}") for v in row])
        ps = [_rational(p, f"{where}: prob {k + 1}") for k, p in enumerate(probs)]
        g = DiscreteGenerator.from_values(rows, ps)
        report = validate_generator(g)
        if not report.ok:
            raise ValidationFailed(report, where)
        declared = obj.get("bound")
        if declared is not None and float(declared) < g.bound:
            raise SpecError(f"{where}: declared bound {declared} is below the largest atom entry {g.bound}")
        return g
    if kind != "sampler":
        raise SpecError(f"{where}: unknown kind {kind!r}")
    spec = _require(obj, "sampler", where)
    if not isinstance(spec, Mapping):
        raise SpecError(f"{where}: sampler must be an object")
    name = _require(spec, "name", f"{where}.sampler")
    params = spec.get("params") or {}
    if name == "product":
        factors = [generator_from_dict(f, f"{where}.factor[{i + 1}]")
                   for i, f in enumerate(_require(params, "factors", f"{where}.sampler.params"))]
        g = product_sampler(*factors)
    elif name == "truncated":
        base = generator_from_dict(_require(params, "base", f"{where}.sampler.params"), f"{where}.base")
        c = float(_require(params, "c", f"{where}.sampler.params"))
        g = truncate_normalize(base, c, mu=params.get("mu"),
                               samples=int(params.get("samples", 100_000)),
                               seed=int(params.get("seed", 0)))
    elif name in SAMPLERS:
        try:
            g = SAMPLERS[name](d, **params)
        except TypeError as exc:
            raise SpecError(f"{where}: bad params for sampler {name!r}: {exc}") from exc
    else:
        known = ", ".join(sorted(SAMPLERS) + ["product", "truncated"])
        raise SpecError(f"{where}: unknown sampler {name!r} (known: {known})")
    if g.dimension != d:
        raise SpecError(f"{where}: sampler has dimension {g.dimension}, declared {d}")
    declared = obj.get("bound")
    if declared is not None and (g.bound is None or float(declared) < g.bound):
        raise SpecError(
            f"{where}: declared bound {declared} is not implied by sampler {name!r} "
            f"(bound {g.bound}); use a truncated sampler")
    return g


def _load_json(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def parse_generator_file(path):
    """Read, build and validate a generator from a JSON file.

    Raises
    ------
    SpecError
        On malformed JSON (with line and column), unknown sampler names or
        inconsistent fields; :class:`ValidationFailed` carries the report.
    """
    return generator_from_dict(_load_json(path), str(path))


def write_generator_file(g, path) -> None:
    emit_results(generator_to_dict(g), path, "json")


def law_from_dict(obj: Mapping, where: str = "law") -> DiscreteScalarLaw:
    if not isinstance(obj, Mapping):
        raise SpecError(f"{where}: expected a JSON object")
    support = [_rational(v, f"{where}: support") for v in _require(obj, "support", where)]
    probs = [_rational(p, f"{where}: probs") for p in _require(obj, "probs", where)]
    bound = obj.get("bound")
    return DiscreteScalarLaw(support, probs, None if bound is None else _rational(bound, f"{where}: bound"))


def parse_law_file(path) -> DiscreteScalarLaw:
    return law_from_dict(_load_json(path), str(path))


# --- output ------------------------------------------------------------------------


def format_float(v: float) -> str:
    """17 significant digits, always with a decimal point or exponent."""
    s = format(float(v), ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _encode(v) -> str:
    if v is None or isinstance(v, (bool, np.bool_)):
        return "null" if v is None else ("true" if v else "false")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating, Fraction)):
        f = float(v)
        return format_float(f) if math.isfinite(f) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, Mapping):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_encode(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ",".join(_encode(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj) -> str:
    """Compact JSON with insertion-ordered keys and 17-digit floats.

    Non-finite floats become ``null``.
    """
    return _encode(obj)


def _csv_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_csv(stream, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])


def emit_results(report, path=None, format: str = "json") -> None:
    """Write ``report`` to ``path`` (stdout if ``None`` or ``"-"``).

    ``report`` is a mapping for JSON and a ``(header, rows)`` pair for CSV.
    """
    if format not in ("json", "csv"):
        raise ValueError(f"unknown format {format!r}")

    def write(stream):
        if format == "json":
            stream.write(dumps(report) + "\n")
        else:
            header, rows = report
            write_csv(stream, header, rows)

    if path is None or str(path) == "-":
        write(sys.stdout)
        return
    try:
        with open(path, "w", newline="") as fh:
            write(fh)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_samples_csv(path) -> np.ndarray:
    """The ``eta`` columns of a samples CSV written by ``dnorm simulate``."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows:
        raise SpecError(f"{path}: empty file")
    header = rows[0]
    cols = [i for i, h in enumerate(header) if h.startswith("eta_")]
    if not cols:
        raise SpecError(f"{path}: no eta_ columns in header {header}")
    try:
        return np.array([[float(r[i]) for i in cols] for r in rows[1:]], dtype=float).reshape(-1, len(cols))
    except (ValueError, IndexError) as exc:
        raise SpecError(f"{path}: malformed row: {exc}") from exc


# --- configuration -----------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by the command-line subcommands."""

    seed: int = 0
    samples: int = 100_000
    tol: float = 1e-6
    max_steps: int = 64
    grid: str | None = None
    out: str | None = None

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.samples < 2:
            raise ValueError("samples must be at least 2")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")

    def with_env(self, environ: Mapping[str, str] | None = None) -> "RunConfig":
        """Apply the ``DNORM_SEED`` override, if set."""
        environ = os.environ if environ is None else environ
        raw = environ.get(SEED_ENV)
        if raw is None or raw == "":
            return self
        try:
            seed = int(raw, 0)
        except ValueError as exc:
            raise ValueError(f"{SEED_ENV}={raw!r} is not an integer") from exc
        return replace(self, seed=seed)

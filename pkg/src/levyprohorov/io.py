"""JSON file formats for spaces, measures, distribution functions and sequences.

Rationals are written as reduced ``"p/q"`` strings::

    {"space": "line", "atoms": ["0", "1/4"], "weights": ["2/3", "1/3"]}
    {"breakpoints": ["0", "1"], "values": ["0", "1"], "slopes": ["1"]}
    {"n": 3, "dist": [["0", "1", "2"], ["1", "0", "1"], ["2", "1", "0"]]}

A measure on a finite space carries the space inline (``"space": {"n": ..,
"dist": ..}``) or by reference (``"space": {"file": "space.json"}``).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .measures import (
    LINE,
    DiscreteMeasure,
    FiniteMetricSpace,
    MeasureError,
    PiecewiseCdf,
    make_discrete_measure,
)
from .rational import RationalParseError, as_rational, fmt


class ParseError(ValueError):
    """Malformed input file; the message names the file and the offending field."""


def _where(path, field) -> str:
    return f"{path}: {field}" if path else field


def _rationals(raw, field, path) -> list:
    if not isinstance(raw, list):
        raise ParseError(f"{_where(path, field)}: expected a list")
    out = []
    for k, v in enumerate(raw):
        try:
            out.append(as_rational(v, f"{field}[{k}]"))
        except RationalParseError as exc:
            raise ParseError(_where(path, str(exc))) from None
    return out


def space_from_json(obj, path=None, base: Path = None):
    if obj in (None, "line"):
        return LINE
    if isinstance(obj, dict) and "file" in obj:
        ref = Path(obj["file"])
        if base is not None and not ref.is_absolute():
            ref = base / ref
        return space_from_json(_load(ref), ref, ref.parent)
    if isinstance(obj, dict) and "dist" in obj:
        dist = obj["dist"]
        if not isinstance(dist, list):
            raise ParseError(f"{_where(path, 'dist')}: expected a matrix")
        rows = [_rationals(row, f"dist[{i}]", path) for i, row in enumerate(dist)]
        if "n" in obj and obj["n"] != len(rows):
            raise ParseError(f"{_where(path, 'n')}: says {obj['n']} but dist has {len(rows)} rows")
        try:
            return FiniteMetricSpace(tuple(tuple(r) for r in rows))
        except MeasureError as exc:
            raise ParseError(_where(path, f"dist: {exc}")) from None
    raise ParseError(f"{_where(path, 'space')}: expected 'line' or a finite metric space")


def space_to_json(space) -> Union[str, dict]:
    if space == LINE:
        return "line"
    return {"n": space.n, "dist": [[fmt(v) for v in row] for row in space.dist]}


def measure_from_json(obj, path=None, base: Path = None):
    """Build a :class:`DiscreteMeasure` or :class:`PiecewiseCdf` from parsed JSON."""
    if not isinstance(obj, dict):
        raise ParseError(f"{_where(path, 'root')}: expected a JSON object")
    if "breakpoints" in obj:
        for key in ("values", "slopes"):
            if key not in obj:
                raise ParseError(f"{_where(path, key)}: missing")
        bp = _rationals(obj["breakpoints"], "breakpoints", path)
        vals = _rationals(obj["values"], "values", path)
        slopes = _rationals(obj["slopes"], "slopes", path)
        try:
            return PiecewiseCdf(tuple(bp), tuple(vals), tuple(slopes))
        except MeasureError as exc:
            raise ParseError(_where(path, str(exc))) from None
    for key in ("atoms", "weights"):
        if key not in obj:
            raise ParseError(f"{_where(path, key)}: missing")
    space = space_from_json(obj.get("space", "line"), path, base)
    atoms = obj["atoms"]
    if not isinstance(atoms, list):
        raise ParseError(f"{_where(path, 'atoms')}: expected a list")
    if space == LINE:
        atoms = _rationals(atoms, "atoms", path)
    weights = _rationals(obj["weights"], "weights", path)
    try:
        return make_discrete_measure(space, atoms, weights)
    except MeasureError as exc:
        raise ParseError(_where(path, str(exc))) from None


def measure_to_json(m) -> dict:
    if isinstance(m, PiecewiseCdf):
        return {
            "breakpoints": [fmt(b) for b in m.breakpoints],
            "values": [fmt(v) for v in m.values],
            "slopes": [fmt(s) for s in m.slopes],
        }
    atoms = [fmt(a) for a in m.atoms] if m.space == LINE else list(m.atoms)
    return {"space": space_to_json(m.space), "atoms": atoms, "weights": [fmt(w) for w in m.weights]}


def _load(path: Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def parse_measure_file(path) -> Union[DiscreteMeasure, PiecewiseCdf]:
    path = Path(path)
    return measure_from_json(_load(path), path, path.parent)


def parse_space_file(path) -> FiniteMetricSpace:
    path = Path(path)
    return space_from_json(_load(path), path, path.parent)


def write_measure_file(m, path) -> None:
    Path(path).write_text(json.dumps(measure_to_json(m), indent=2) + "\n")


def parse_sequence_file(path) -> tuple:
    """Sequence corpus: a list of measures (inline or file names), or an object
    ``{"sequence": [...], "limit": ...}``.  Returns ``(measures, limit or None)``."""
    path = Path(path)
    raw = _load(path)
    limit_raw = None
    if isinstance(raw, dict):
        if "sequence" not in raw:
            raise ParseError(f"{path}: sequence: missing")
        limit_raw = raw.get("limit")
        raw = raw["sequence"]
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{path}: sequence: expected a nonempty list")

    def one(entry, field):
        if isinstance(entry, str):
            ref = Path(entry)
            if not ref.is_absolute():
                ref = path.parent / ref
            return parse_measure_file(ref)
        return measure_from_json(entry, f"{path}: {field}", path.parent)

    seq = [one(e, f"sequence[{k}]") for k, e in enumerate(raw)]
    limit = one(limit_raw, "limit") if limit_raw is not None else None
    return seq, limit

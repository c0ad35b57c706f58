"""Problem, subspace and map files (JSON)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple

from ..coeff import Chart, CoeffFn, GaussianRational, Model, ModelError
from ..geomrel import LinearHolomorphicMap, LinearSubmanifold
from ..mcstruct import ExtendedPoisson
from .parser import ParseError, parse_expr

__all__ = ["ProblemError", "ProblemSpec", "load_problem", "parse_problem", "load_subspace", "load_map", "parse_scalar"]


class ProblemError(ValueError):
    """Malformed or inconsistent input file."""


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ProblemError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _read_json(path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


@dataclass
class ProblemSpec:
    model: Model
    tables: Dict[str, Dict[Tuple[int, int], CoeffFn]]
    options: Dict[str, Any] = field(default_factory=dict)

    @property
    def H(self) -> ExtendedPoisson:
        return ExtendedPoisson.from_tables(self.model, **self.tables)


def _index_pair(key: str, n: int, table: str) -> Tuple[int, int]:
    parts = key.split(",")
    if len(parts) != 2:
        raise ProblemError(f"H.{table}: key {key!r} must look like \"i,j\"")
    try:
        i, j = (int(p.strip()) for p in parts)
    except ValueError:
        raise ProblemError(f"H.{table}: key {key!r} must hold two integers") from None
    if not (1 <= i <= n and 1 <= j <= n):
        raise ProblemError(f"H.{table}: index pair {key!r} out of range 1..{n}")
    if table in ("pi", "omega") and i >= j:
        raise ProblemError(f"H.{table}: key {key!r} violates the i<j convention (list each pair once with i<j)")
    return i - 1, j - 1


def parse_problem(data: Any) -> ProblemSpec:
    if not isinstance(data, dict):
        raise ProblemError("problem file must hold a JSON object")
    unknown = set(data) - {"manifold", "H", "options"}
    if unknown:
        raise ProblemError(f"unknown top-level fields: {sorted(unknown)}")
    man = data.get("manifold")
    if not isinstance(man, dict) or "model" not in man or "dim" not in man:
        raise ProblemError("manifold must have fields 'model' and 'dim'")
    kind, n = man["model"], man["dim"]
    if kind not in ("chart", "torus"):
        raise ProblemError(f"manifold.model must be 'chart' or 'torus', got {kind!r}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemError("manifold.dim must be a positive integer")
    model = Model(kind, n)
    h = data.get("H", {})
    if not isinstance(h, dict):
        raise ProblemError("H must be an object")
    unknown = set(h) - {"pi", "theta", "omega"}
    if unknown:
        raise ProblemError(f"unknown fields in H: {sorted(unknown)}")
    tables: Dict[str, Dict[Tuple[int, int], CoeffFn]] = {}
    for name in ("pi", "theta", "omega"):
        raw = h.get(name, {})
        if not isinstance(raw, dict):
            raise ProblemError(f"H.{name} must be an object")
        table = {}
        for key, text in raw.items():
            pair = _index_pair(key, n, name)
            if pair in table:
                raise ProblemError(f"H.{name}: pair {key!r} listed twice")
            if not isinstance(text, str):
                raise ProblemError(f"H.{name}[{key!r}] must be an expression string")
            try:
                table[pair] = parse_expr(text, model)
            except (ParseError, ModelError) as exc:
                raise ProblemError(f"H.{name}[{key!r}]: {exc}") from None
        tables[name] = table
    options = data.get("options", {})
    if not isinstance(options, dict):
        raise ProblemError("options must be an object")
    return ProblemSpec(model, tables, options)


def load_problem(path) -> ProblemSpec:
    return parse_problem(_read_json(path))


_SCALAR_MODEL = Chart(1)


def parse_scalar(x) -> GaussianRational:
    """A Gaussian rational from a JSON number or an expression string such as ``"1/2-3i"``."""
    if isinstance(x, bool):
        raise ProblemError("booleans are not scalars")
    if isinstance(x, int):
        return GaussianRational(x)
    if isinstance(x, str):
        try:
            f = parse_expr(x, _SCALAR_MODEL)
        except (ParseError, ModelError) as exc:
            raise ProblemError(f"bad scalar {x!r}: {exc}") from None
        if not f.is_constant():
            raise ProblemError(f"scalar {x!r} must not depend on coordinates")
        return f.constant_value()
    raise ProblemError(f"scalars must be integers or strings, got {x!r}")


def _scalar_list(raw, what: str) -> List[GaussianRational]:
    if not isinstance(raw, list):
        raise ProblemError(f"{what} must be a list")
    return [parse_scalar(x) for x in raw]


def load_subspace(path, model: Model) -> LinearSubmanifold:
    """``{"basis": [column, ...], "offset": [...]}`` with columns of length ``n``."""
    data = _read_json(path)
    if not isinstance(data, dict) or "basis" not in data:
        raise ProblemError("subspace file needs a 'basis' field")
    cols = [_scalar_list(c, "basis column") for c in data["basis"]]
    if not cols or any(len(c) != model.n for c in cols):
        raise ProblemError(f"each basis column must have {model.n} entries")
    offset = _scalar_list(data["offset"], "offset") if "offset" in data else None
    try:
        return LinearSubmanifold.from_columns(model, cols, offset)
    except (ValueError, ModelError) as exc:
        raise ProblemError(f"{path}: {exc}") from None


def load_map(path, source: Model, target: Model) -> LinearHolomorphicMap:
    """``{"matrix": [row, ...], "translation": [...]}``; the matrix is ``target.n x source.n``."""
    data = _read_json(path)
    if not isinstance(data, dict) or "matrix" not in data:
        raise ProblemError("map file needs a 'matrix' field")
    rows = [_scalar_list(r, "matrix row") for r in data["matrix"]]
    b = _scalar_list(data["translation"], "translation") if "translation" in data else None
    try:
        return LinearHolomorphicMap(source, target, rows, b)
    except (ValueError, ModelError) as exc:
        raise ProblemError(f"{path}: {exc}") from None

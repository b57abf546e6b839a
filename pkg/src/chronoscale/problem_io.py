"""Problem files (JSON in) and reports (JSON/CSV out).

A problem file looks like::

    {
      "scale": {"kind": "qscale", "q": 2, "N": 4, "t0": 1},
      "phi": "t",
      "lambdas": [1, 2],
      "forcing": "const:0",
      "order": 2
    }

``scale`` is a family spec or an explicit list of points. ``phi`` and
``forcing`` take the tags ``"t"``, ``"const:<c>"``, ``"table:[...]"`` (also
a bare number or ``{"table": [...]}``). Complex numbers may be written as
``[re, im]``, ``{"re": .., "im": ..}`` or a Python literal such as ``"1-2j"``.
Exactly one of ``lambdas``/``alphas`` must be present.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ProblemFileError, ValidationError
from .operator import CauchyEulerProblem
from .stability import ScaleFamilySpec, generate_scale
from .symmetric import alphas_to_lambdas, check_monic
from .timescale import GridFunction, TimeScale

SCALE_KEYS = {"kind", "N", "h", "q", "t0", "points", "min_gap", "max_gap", "seed"}
PROBLEM_KEYS = {"scale", "phi", "lambdas", "alphas", "forcing", "order", "x", "anchors"}
CSV_COLUMNS = ("t", "x", "u", "abs_dev", "residual")


def parse_complex(v) -> complex:
    if isinstance(v, bool):
        raise ProblemFileError(f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, dict) and set(v) <= {"re", "im"}:
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            pass
    raise ProblemFileError(f"cannot read {v!r} as a number")


def _parse_table(entries, n_points, name):
    if not isinstance(entries, list):
        raise ProblemFileError(f"{name} table must be a list")
    if len(entries) != n_points:
        raise ProblemFileError(f"{name} table has {len(entries)} entries, scale has {n_points} points")
    return np.array([parse_complex(e) for e in entries])


def parse_function(tag, ts: TimeScale, name: str) -> GridFunction:
    """Evaluate a ``phi``/``forcing`` tag at every scale point."""
    n = len(ts)
    if isinstance(tag, (int, float)) and not isinstance(tag, bool):
        return GridFunction.constant(ts, complex(tag))
    if isinstance(tag, dict) and set(tag) == {"table"}:
        return GridFunction(ts, 0, _parse_table(tag["table"], n, name))
    if isinstance(tag, str):
        if tag.strip() == "t":
            return GridFunction.from_callable(ts, lambda t: t)
        if tag.startswith("const:"):
            return GridFunction.constant(ts, parse_complex(tag[len("const:"):]))
        if tag.startswith("table:"):
            try:
                entries = json.loads(tag[len("table:"):])
            except json.JSONDecodeError as exc:
                raise ProblemFileError(f"{name}: malformed table: {exc}") from exc
            return GridFunction(ts, 0, _parse_table(entries, n, name))
    raise ProblemFileError(f"{name}: unrecognised function tag {tag!r}")


def parse_scale(entry) -> tuple[ScaleFamilySpec, TimeScale]:
    if isinstance(entry, list):
        entry = {"kind": "custom", "points": entry}
    if not isinstance(entry, dict):
        raise ProblemFileError("scale must be a list of points or a family object")
    if "kind" not in entry and "points" in entry:
        entry = {"kind": "custom", **entry}
    unknown = set(entry) - SCALE_KEYS
    if unknown:
        raise ProblemFileError(f"unknown scale keys: {sorted(unknown)}")
    if "points" in entry:
        if not isinstance(entry["points"], list):
            raise ProblemFileError("scale points must be a list")
        entry = {**entry, "points": tuple(float(p) for p in entry["points"])}
    try:
        spec = ScaleFamilySpec(**entry)
        return spec, generate_scale(spec)
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"bad scale parameters: {exc}") from exc


@dataclass
class ProblemSpec:
    """A parsed problem file before hypothesis checks."""

    scale_spec: ScaleFamilySpec
    scale: TimeScale
    phi: GridFunction
    forcing: GridFunction
    lambdas: tuple
    alphas: np.ndarray | None
    x: GridFunction | None
    anchors: tuple | None
    digest: str

    @property
    def order(self) -> int:
        return len(self.lambdas)

    def build(self) -> CauchyEulerProblem:
        return CauchyEulerProblem(self.scale, self.phi, self.lambdas, self.forcing)


def parse_problem(doc: dict, digest: str = "") -> ProblemSpec:
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must contain a JSON object")
    unknown = set(doc) - PROBLEM_KEYS
    if unknown:
        raise ProblemFileError(f"unknown problem keys: {sorted(unknown)}")
    if "scale" not in doc:
        raise ProblemFileError("problem file needs a 'scale'")
    if ("lambdas" in doc) == ("alphas" in doc):
        raise ProblemFileError("give exactly one of 'lambdas' or 'alphas'")
    spec, ts = parse_scale(doc["scale"])
    phi = parse_function(doc.get("phi", "t"), ts, "phi")
    forcing = parse_function(doc.get("forcing", 0), ts, "forcing")

    alphas = None
    if "lambdas" in doc:
        if not isinstance(doc["lambdas"], list) or not doc["lambdas"]:
            raise ProblemFileError("lambdas must be a non-empty list")
        lambdas = tuple(parse_complex(v) for v in doc["lambdas"])
    else:
        if not isinstance(doc["alphas"], list):
            raise ProblemFileError("alphas must be a list")
        alphas = check_monic([parse_complex(v) for v in doc["alphas"]])
        lambdas = tuple(complex(v) for v in alphas_to_lambdas(alphas))
    order = doc.get("order", len(lambdas))
    if order != len(lambdas):
        raise ProblemFileError(f"order {order!r} does not match {len(lambdas)} characteristic values")

    x = None
    if "x" in doc:
        x = GridFunction(ts, 0, _parse_table(doc["x"], len(ts), "x"))
    anchors = None
    if "anchors" in doc:
        anchors = parse_anchors(doc["anchors"])
    return ProblemSpec(spec, ts, phi, forcing, lambdas, alphas, x, anchors, digest)


def parse_anchors(value) -> tuple:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    try:
        return tuple(int(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"anchors must be integers, got {value!r}") from exc


def load_json(path) -> tuple[object, str]:
    """Parse a UTF-8 JSON file; returns the document and the sha256 of its bytes."""
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProblemFileError(f"{path}: malformed JSON: {exc}") from exc
    return doc, hashlib.sha256(raw).hexdigest()


def load_problem(path) -> ProblemSpec:
    doc, digest = load_json(path)
    return parse_problem(doc, digest)


# ---------------------------------------------------------------- output


def _num(v: float) -> str:
    if not math.isfinite(v):
        return "null"
    return format(v, ".17g")


def to_jsonable(obj):
    """Normalise numpy/complex values; complex scalars become ``{"re", "im"}``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, GridFunction):
        return to_jsonable(obj.values)
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if np.all(obj.imag == 0):
                return [float(v) for v in obj.real]
            return {"re": [float(v) for v in obj.real], "im": [float(v) for v in obj.imag]}
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        if obj and all(isinstance(v, (complex, np.complexfloating)) for v in obj):
            return to_jsonable(np.asarray(obj, dtype=complex))
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        return c.real if c.imag == 0 else {"re": c.real, "im": c.imag}
    return obj


def _emit(obj, indent, level) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    return json.dumps(obj)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _emit(to_jsonable(obj), indent, 0) + "\n"


def loads(text: str):
    """Inverse of :func:`dumps`; non-finite numbers come back as ``None``."""
    return json.loads(text)


def _csv_num(c: complex) -> str:
    if c.imag == 0:
        return _num(c.real)
    return f"{_num(c.real)}{'+' if c.imag >= 0 else '-'}{_num(abs(c.imag))}j"


def write_csv(path, t, x, u, r) -> None:
    """Columns ``t, x, u, abs_dev, residual``; residual is blank where undefined."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(CSV_COLUMNS)
        for i in range(len(t)):
            res = _csv_num(complex(r.values[i])) if r.start <= i <= r.end else ""
            xi, ui = complex(x.values[i]), complex(u.values[i])
            w.writerow((_num(float(t[i])), _csv_num(xi), _csv_num(ui), _num(abs(xi - ui)), res))

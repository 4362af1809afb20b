"""Problem files: YAML or JSON documents describing one amp1 or derived problem.

Every number is a string in the exact-rational grammar (plain integers are
accepted too); floats are rejected. Unknown keys are errors, and every error
names the key path it came from, e.g. ``zero_locus.charts[0].param_map[1]``.
"""

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from .atiyah import DEFAULT_JET_ORDER, Amp1Problem
from .clean import Chart, ZeroLocusWitness
from .connection import ConnectionTriple
from .derived import DerivedProblem, Intersection, IntersectionWitness, SubmanifoldParam, build_amp1
from .errors import EngineError, ExpressionSyntaxError, ProblemFileError
from .graded import Section
from .ring import Poly
from .utils.expression_parser import parse_poly, parse_rational

logger = logging.getLogger(__name__)

PROBLEM_SUFFIXES = (".yaml", ".yml", ".json")

AMP1_KEYS = {
    "kind", "description", "vars", "fiber_rank", "section", "points",
    "zero_locus", "connection", "degree_bound", "jet_order",
}
DERIVED_KEYS = {
    "kind", "description", "ambient_dim", "X", "Y", "intersections",
    "degree_bound", "jet_order",
}
CHART_KEYS = {"base_point", "param_vars", "param_map", "param_point", "claimed_dim"}
CONNECTION_KEYS = {"gamma_m", "gamma_e", "beta"}
SUBMANIFOLD_KEYS = {"param_vars", "map"}
INTERSECTION_KEYS = {"x_params", "y_params", "claimed_dim", "manifold"}


@dataclass(frozen=True)
class ProblemFile:
    kind: str  # "amp1" | "derived"
    source: str
    description: str = ""
    amp1: Optional[Amp1Problem] = None
    witness: Optional[ZeroLocusWitness] = None
    derived: Optional[DerivedProblem] = None
    degree_bound: Optional[int] = None
    jet_order: Optional[int] = None

    def problem(self, degree_bound: Optional[int] = None, jet_order: Optional[int] = None) -> Amp1Problem:
        """The amp1 problem (built from X, Y for derived files) with the given bounds applied."""
        base = self.amp1 if self.kind == "amp1" else build_amp1(self.derived)
        return replace(
            base,
            degree_bound=degree_bound,
            jet_order=DEFAULT_JET_ORDER if jet_order is None else jet_order,
        )


class _Reader:
    """Walks the parsed tree, carrying the key path for diagnostics."""

    def __init__(self, source: str):
        self.source = source

    def fail(self, location: str, message: str):
        raise ProblemFileError(message, location, self.source)

    def mapping(self, value, location: str, allowed: set[str], required: tuple[str, ...] = ()) -> dict:
        if not isinstance(value, dict):
            self.fail(location, f"expected a mapping, got {type(value).__name__}")
        unknown = sorted(str(k) for k in value if k not in allowed)
        if unknown:
            self.fail(location, f"unknown keys: {', '.join(unknown)}")
        for key in required:
            if key not in value:
                self.fail(_join(location, key), "required key is missing")
        return value

    def sequence(self, value, location: str) -> list:
        if not isinstance(value, list):
            self.fail(location, f"expected a list, got {type(value).__name__}")
        return value

    def integer(self, value, location: str, minimum: int = 0) -> int:
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            self.fail(location, f"expected an integer, got {value!r}")
        try:
            number = int(value)
        except ValueError:
            self.fail(location, f"expected an integer, got {value!r}")
        if number < minimum:
            self.fail(location, f"must be >= {minimum}")
        return number

    def optional_integer(self, data: dict, key: str) -> Optional[int]:
        if data.get(key) is None:
            return None
        return self.integer(data[key], key)

    def names(self, value, location: str) -> tuple[str, ...]:
        names = tuple(self.sequence(value, location))
        for index, name in enumerate(names):
            if not isinstance(name, str) or not name.isidentifier():
                self.fail(f"{location}[{index}]", f"not a variable name: {name!r}")
        if len(set(names)) != len(names):
            self.fail(location, "variable names must be distinct")
        return names

    def poly(self, value, location: str, variables: tuple[str, ...]) -> Poly:
        if isinstance(value, int) and not isinstance(value, bool):
            value = str(value)
        if not isinstance(value, str):
            self.fail(location, f"expected an expression string, got {value!r}")
        try:
            return parse_poly(value, variables)
        except ExpressionSyntaxError as exc:
            self.fail(location, str(exc))

    def polys(self, value, location: str, variables: tuple[str, ...]) -> tuple[Poly, ...]:
        items = self.sequence(value, location)
        return tuple(self.poly(item, f"{location}[{i}]", variables) for i, item in enumerate(items))

    def point(self, value, location: str, length: Optional[int] = None) -> tuple:
        items = self.sequence(value, location)
        if length is not None and len(items) != length:
            self.fail(location, f"expected {length} coordinates, got {len(items)}")
        coordinates = []
        for index, item in enumerate(items):
            try:
                coordinates.append(parse_rational(item))
            except ExpressionSyntaxError as exc:
                self.fail(f"{location}[{index}]", exc.reason)
        return tuple(coordinates)

    def index_key(self, key, location: str, bounds: tuple[int, ...]) -> tuple[int, ...]:
        parts = str(key).split(",")
        if len(parts) != len(bounds) or not all(p.strip().isdigit() for p in parts):
            self.fail(location, f"key {key!r} must be {len(bounds)} comma-separated 1-based indices")
        index = tuple(int(p) - 1 for p in parts)
        if any(not 0 <= k < b for k, b in zip(index, bounds)):
            self.fail(location, f"key {key!r} out of range")
        return index


def _join(location: str, key: str) -> str:
    return f"{location}.{key}" if location else key


def load_document(path: Path) -> Any:
    source = str(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFileError(f"cannot read file: {exc.strerror}", source=source) from exc
    try:
        if path.suffix == ".json":
            return json.loads(text)
        return yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ProblemFileError(f"not a valid document: {exc}", source=source) from exc


def load_problem(path: Union[str, Path]) -> ProblemFile:
    path = Path(path)
    logger.debug("loading problem file %s", path)
    return parse_problem(load_document(path), str(path))


def parse_problem(document: Any, source: str = "<memory>") -> ProblemFile:
    reader = _Reader(source)
    if not isinstance(document, dict):
        reader.fail("", "top level must be a mapping")
    kind = document.get("kind")
    try:
        if kind == "amp1":
            return _parse_amp1(reader, document)
        if kind == "derived":
            return _parse_derived(reader, document)
    except ProblemFileError:
        raise
    except EngineError as exc:
        raise ProblemFileError(str(exc), "", source) from exc
    reader.fail("kind", f"must be 'amp1' or 'derived', got {kind!r}")


def _parse_amp1(reader: _Reader, data: dict) -> ProblemFile:
    reader.mapping(data, "", AMP1_KEYS, ("kind", "vars", "fiber_rank", "section"))
    variables = reader.names(data["vars"], "vars")
    n = len(variables)
    m = reader.integer(data["fiber_rank"], "fiber_rank")
    components = reader.polys(data["section"], "section", variables)
    if len(components) != m:
        reader.fail("section", f"expected {m} components (fiber_rank), got {len(components)}")
    points = tuple(
        reader.point(p, f"points[{i}]", n) for i, p in enumerate(reader.sequence(data.get("points", []), "points"))
    )
    connection = None
    if data.get("connection") is not None:
        connection = _parse_connection(reader, data["connection"], variables, m)
    witness = None
    if data.get("zero_locus") is not None:
        witness = _parse_witness(reader, data["zero_locus"], n)

    degree_bound = reader.optional_integer(data, "degree_bound")
    jet_order = reader.optional_integer(data, "jet_order")
    problem = Amp1Problem(Section(variables, components), connection, points)
    return ProblemFile(
        kind="amp1",
        source=reader.source,
        description=str(data.get("description") or ""),
        amp1=problem,
        witness=witness,
        degree_bound=degree_bound,
        jet_order=jet_order,
    )


def _parse_connection(reader: _Reader, value, variables: tuple[str, ...], m: int) -> ConnectionTriple:
    block = reader.mapping(value, "connection", CONNECTION_KEYS)
    n = len(variables)
    bounds = {"gamma_m": (n, n, n), "gamma_e": (n, m, m), "beta": (n, n, m, m)}
    parsed = {}
    for name, shape in bounds.items():
        entries = block.get(name) or {}
        location = f"connection.{name}"
        if not isinstance(entries, dict):
            reader.fail(location, "expected a mapping of index keys to expressions")
        parsed[name] = {
            reader.index_key(key, location, shape): reader.poly(expr, f"{location}[{key}]", variables)
            for key, expr in entries.items()
        }
    return ConnectionTriple(variables, m, **parsed)


def _parse_witness(reader: _Reader, value, n: int) -> ZeroLocusWitness:
    block = reader.mapping(value, "zero_locus", {"points", "charts"})
    points = tuple(
        reader.point(p, f"zero_locus.points[{i}]", n)
        for i, p in enumerate(reader.sequence(block.get("points", []), "zero_locus.points"))
    )
    charts = []
    for index, raw in enumerate(reader.sequence(block.get("charts", []), "zero_locus.charts")):
        location = f"zero_locus.charts[{index}]"
        chart = reader.mapping(raw, location, CHART_KEYS, tuple(sorted(CHART_KEYS)))
        param_vars = reader.names(chart["param_vars"], f"{location}.param_vars")
        charts.append(
            Chart(
                base_point=reader.point(chart["base_point"], f"{location}.base_point", n),
                param_vars=param_vars,
                param_map=reader.polys(chart["param_map"], f"{location}.param_map", param_vars),
                param_point=reader.point(chart["param_point"], f"{location}.param_point", len(param_vars)),
                claimed_dim=reader.integer(chart["claimed_dim"], f"{location}.claimed_dim"),
            )
        )
    return ZeroLocusWitness(points, tuple(charts))


def _parse_submanifold(reader: _Reader, value, name: str, d: int) -> SubmanifoldParam:
    block = reader.mapping(value, name, SUBMANIFOLD_KEYS, ("param_vars", "map"))
    param_vars = reader.names(block["param_vars"], f"{name}.param_vars")
    components = reader.polys(block["map"], f"{name}.map", param_vars)
    if len(components) != d:
        reader.fail(f"{name}.map", f"expected {d} components (ambient_dim), got {len(components)}")
    return SubmanifoldParam(d, param_vars, components)


def _parse_derived(reader: _Reader, data: dict) -> ProblemFile:
    reader.mapping(data, "", DERIVED_KEYS, ("kind", "ambient_dim", "X", "Y"))
    d = reader.integer(data["ambient_dim"], "ambient_dim")
    X = _parse_submanifold(reader, data["X"], "X", d)
    Y = _parse_submanifold(reader, data["Y"], "Y", d)
    if set(X.param_vars) & set(Y.param_vars):
        reader.fail("Y.param_vars", "X and Y must use distinct parameter names")
    intersections = []
    for index, raw in enumerate(reader.sequence(data.get("intersections", []), "intersections")):
        location = f"intersections[{index}]"
        block = reader.mapping(raw, location, INTERSECTION_KEYS, ("x_params", "y_params"))
        witness = None
        if block.get("claimed_dim") is not None:
            manifold = block.get("manifold", True)
            if not isinstance(manifold, bool):
                reader.fail(f"{location}.manifold", "expected true or false")
            witness = IntersectionWitness(reader.integer(block["claimed_dim"], f"{location}.claimed_dim"), manifold)
        elif "manifold" in block:
            reader.fail(f"{location}.manifold", "manifold needs a claimed_dim")
        intersections.append(
            Intersection(
                reader.point(block["x_params"], f"{location}.x_params", X.dim),
                reader.point(block["y_params"], f"{location}.y_params", Y.dim),
                witness,
            )
        )
    derived = DerivedProblem(X, Y, tuple(intersections))
    return ProblemFile(
        kind="derived",
        source=reader.source,
        description=str(data.get("description") or ""),
        derived=derived,
        degree_bound=reader.optional_integer(data, "degree_bound"),
        jet_order=reader.optional_integer(data, "jet_order"),
    )


def discover(directory: Union[str, Path]) -> list[Path]:
    """Problem files under ``directory``, recursively, in sorted order."""
    root = Path(directory)
    return sorted(p for p in root.rglob("*") if p.is_file() and p.suffix in PROBLEM_SUFFIXES)

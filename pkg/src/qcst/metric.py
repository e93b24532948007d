"""Metric specifications and their jets at a point.

Metric file format (UTF-8, one statement per line, ``#`` starts a comment)::

    label: flat FLRW, a = t^2
    coordinates: t x y z
    param M = 1.0
    g_tt = -1
    g_xx = (t^2)^2
    g_t_x = 0                  # underscore form for long coordinate names
    generator: 1, 0, 0, 0      # optional candidate A^i (commas or spaces)

Diagonal components are required; omitted off-diagonal ones are zero.
Coordinate 0 is the time coordinate.
"""

from dataclasses import dataclass, field
import math
import re
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

from . import expr, jet
from .exceptions import (
    BadParameter,
    DivisionByZeroJet,
    DuplicateKey,
    ExprError,
    MissingComponent,
    ParseError,
    SignatureError,
    SingularMetric,
    UnknownBuiltin,
    UnknownCoordinate,
)

DIM = 4
PAIRS = tuple((i, j) for i in range(DIM) for j in range(i, DIM))


@dataclass(frozen=True)
class MetricSpec:
    coordinates: tuple
    components: Mapping  # (i, j) with i <= j -> expression tree
    parameters: Mapping = field(default_factory=dict)
    generator_hint: Optional[tuple] = None
    label: str = ""

    def __post_init__(self):
        coords = tuple(self.coordinates)
        if len(coords) != DIM or len(set(coords)) != DIM:
            raise BadParameter(f"need {DIM} distinct coordinate names, got {coords}")
        comps = {}
        for (i, j), node in dict(self.components).items():
            key = (min(i, j), max(i, j))
            comps[key] = node
        for key in PAIRS:
            comps.setdefault(key, expr.Number(0.0))
        params = {k: float(v) for k, v in dict(self.parameters).items()}
        object.__setattr__(self, "coordinates", coords)
        object.__setattr__(self, "components", MappingProxyType(comps))
        object.__setattr__(self, "parameters", MappingProxyType(params))
        if self.generator_hint is not None:
            object.__setattr__(self, "generator_hint", tuple(self.generator_hint))
        known = set(coords) | set(params)
        nodes = list(comps.values()) + list(self.generator_hint or ())
        for node in nodes:
            unknown = expr.names(node) - known
            if unknown:
                raise UnknownCoordinate(f"unknown name(s) {sorted(unknown)} in {expr.to_source(node)}")

    def equivalent(self, other):
        """Structural equality of coordinates, components and parameters."""
        if self.coordinates != other.coordinates or dict(self.parameters) != dict(other.parameters):
            return False
        if not all(expr.same_tree(self.components[k], other.components[k]) for k in PAIRS):
            return False
        a, b = self.generator_hint, other.generator_hint
        if (a is None) != (b is None):
            return False
        return a is None or all(expr.same_tree(x, y) for x, y in zip(a, b))

    def to_text(self):
        lines = []
        if self.label:
            lines.append(f"label: {self.label}")
        lines.append("coordinates: " + " ".join(self.coordinates))
        for name, value in self.parameters.items():
            lines.append(f"param {name} = {value!r}")
        for i, j in PAIRS:
            node = self.components[(i, j)]
            if i != j and isinstance(node, expr.Number) and node.value == 0.0:
                continue
            lines.append(f"g_{self.coordinates[i]}_{self.coordinates[j]} = {expr.to_source(node)}")
        if self.generator_hint is not None:
            lines.append("generator: " + ", ".join(expr.to_source(e) for e in self.generator_hint))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MetricJet:
    """Metric and inverse metric as jets, shape ``(35, 4, 4)``."""

    g: np.ndarray
    ginv: np.ndarray
    point: tuple
    det_value: float
    coordinates: tuple = ()

    @property
    def g0(self):
        return self.g[0]

    @property
    def ginv0(self):
        return self.ginv[0]


# ---------------------------------------------------------------------------
# file loading
# ---------------------------------------------------------------------------

_COMPONENT = re.compile(r"g_([A-Za-z_0-9]+)$")


def _split_indices(suffix, coords, lineno, col):
    if "_" in suffix:
        parts = suffix.split("_")
        if len(parts) == 2 and all(parts):
            a, b = parts
        else:
            raise ParseError(f"cannot split component index {suffix!r}", lineno, col)
    else:
        matches = [(a, suffix[len(a):]) for a in coords if suffix.startswith(a) and suffix[len(a):] in coords]
        if len(matches) != 1:
            if not matches:
                raise UnknownCoordinate(f"line {lineno}: component g_{suffix} does not name two coordinates")
            raise ParseError(f"ambiguous component name g_{suffix}; use g_<a>_<b>", lineno, col)
        a, b = matches[0]
    for name in (a, b):
        if name not in coords:
            raise UnknownCoordinate(f"line {lineno}: unknown coordinate {name!r} in g_{suffix}")
    return coords.index(a), coords.index(b)


def _parse_expr(text, coords, lineno, col):
    try:
        return expr.parse_expression(text, coords)
    except ExprError as exc:
        raise ParseError(exc.message, lineno, col + exc.offset + 1) from exc


def _split_statement(raw):
    line = raw.split("#", 1)[0].rstrip()
    stripped = line.lstrip()
    return stripped, len(line) - len(stripped)


def load_metric(text):
    """Parse a metric file into a validated ``MetricSpec``."""
    statements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stmt, indent = _split_statement(raw)
        if stmt:
            statements.append((lineno, indent, stmt))

    coords = None
    label = ""
    params = {}
    seen = set()
    for lineno, indent, stmt in statements:
        if stmt.startswith("coordinates:"):
            if coords is not None:
                raise DuplicateKey(f"line {lineno}: coordinates declared twice")
            coords = tuple(stmt[len("coordinates:"):].split())
            if len(coords) != DIM or len(set(coords)) != DIM:
                raise ParseError(f"need {DIM} distinct coordinate names", lineno, indent + 1)
            for c in coords:
                if not re.fullmatch(r"[A-Za-z][A-Za-z0-9]*", c) or c in expr.FUNCTIONS:
                    raise ParseError(f"bad coordinate name {c!r}", lineno, indent + 1)
        elif stmt.startswith("label:"):
            if "label" in seen:
                raise DuplicateKey(f"line {lineno}: label declared twice")
            seen.add("label")
            label = stmt[len("label:"):].strip()
        elif stmt.startswith("param ") or stmt.startswith("param\t"):
            body = stmt[len("param"):]
            name, sep, value = body.partition("=")
            name = name.strip()
            if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                raise ParseError("expected 'param <name> = <real>'", lineno, indent + 1)
            if name in params:
                raise DuplicateKey(f"line {lineno}: parameter {name!r} declared twice")
            try:
                params[name] = float(value)
            except ValueError:
                raise ParseError(f"parameter {name!r} needs a real value", lineno, indent + 1) from None
            if not math.isfinite(params[name]):
                raise ParseError(f"parameter {name!r} is not finite", lineno, indent + 1)
    if coords is None:
        raise MissingComponent("missing 'coordinates:' line")
    clash = set(params) & set(coords)
    if clash:
        raise DuplicateKey(f"names used as both coordinate and parameter: {sorted(clash)}")

    components = {}
    generator = None
    for lineno, indent, stmt in statements:
        if stmt.startswith(("coordinates:", "label:", "param ", "param\t")):
            continue
        if stmt.startswith("generator:"):
            if generator is not None:
                raise DuplicateKey(f"line {lineno}: generator declared twice")
            body = stmt[len("generator:"):]
            start = indent + len("generator:")
            parts = body.split(",") if "," in body else body.split()
            if len(parts) != DIM:
                raise ParseError(f"generator needs {DIM} expressions", lineno, start + 1)
            generator = tuple(_parse_expr(p.strip(), coords, lineno, start) for p in parts)
            continue
        key, sep, rhs = stmt.partition("=")
        key = key.strip()
        m = _COMPONENT.match(key)
        if not sep or not m:
            raise ParseError(f"unknown statement {key!r}", lineno, indent + 1)
        i, j = _split_indices(m.group(1), coords, lineno, indent + 1)
        pair = (min(i, j), max(i, j))
        if pair in components:
            raise DuplicateKey(f"line {lineno}: component g_{coords[pair[0]]}{coords[pair[1]]} given twice")
        rhs_col = indent + len(stmt) - len(rhs) + (len(rhs) - len(rhs.lstrip()))
        components[pair] = _parse_expr(rhs.strip(), coords, lineno, rhs_col)

    for i in range(DIM):
        if (i, i) not in components:
            raise MissingComponent(f"missing diagonal component g_{coords[i]}{coords[i]}")
    return MetricSpec(coords, components, params, generator, label)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _spec(coords, comps, params, hint, label):
    parse = lambda s: expr.parse_expression(s, coords)
    components = {}
    for (i, j), src in comps.items():
        components[(i, j)] = parse(src)
    return MetricSpec(coords, components, params, tuple(parse(h) for h in hint), label)


def _positive(params, name, default):
    value = params.get(name, default)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise BadParameter(f"parameter {name} must be a real number, got {value!r}") from None
    if not value > 0 or not math.isfinite(value):
        raise BadParameter(f"parameter {name} must be positive and finite, got {value}")
    return value


def _scale_factor(params, coords):
    a = str(params.get("a", "t^2"))
    try:
        node = expr.parse_expression(a, coords)
    except ExprError as exc:
        raise BadParameter(f"bad scale factor {a!r}: {exc}") from exc
    extra = expr.names(node) - {coords[0]}
    if extra:
        raise BadParameter(f"scale factor may only depend on {coords[0]}, found {sorted(extra)}")
    return a


def _check_keys(name, params, allowed):
    extra = set(params) - set(allowed)
    if extra:
        raise BadParameter(f"{name} does not take parameter(s) {sorted(extra)}")


def _minkowski(params):
    _check_keys("minkowski", params, ())
    coords = ("t", "x", "y", "z")
    return _spec(coords, {(0, 0): "-1", (1, 1): "1", (2, 2): "1", (3, 3): "1"}, {}, ("1", "0", "0", "0"), "minkowski")


def _flrw_flat(params):
    _check_keys("flrw-flat", params, ("a",))
    coords = ("t", "x", "y", "z")
    a = _scale_factor(params, coords)
    s = f"({a})^2"
    return _spec(coords, {(0, 0): "-1", (1, 1): s, (2, 2): s, (3, 3): s}, {}, ("1", "0", "0", "0"), f"flrw-flat a={a}")


def _flrw_curved(kind, params):
    _check_keys(f"flrw-{kind}", params, ("a",))
    coords = ("t", "chi", "theta", "phi")
    a = _scale_factor(params, coords)
    f = "sin" if kind == "closed" else "sinh"
    s = f"({a})^2"
    comps = {
        (0, 0): "-1",
        (1, 1): s,
        (2, 2): f"{s}*{f}(chi)^2",
        (3, 3): f"{s}*{f}(chi)^2*sin(theta)^2",
    }
    return _spec(coords, comps, {}, ("1", "0", "0", "0"), f"flrw-{kind} a={a}")


def _de_sitter(params):
    _check_keys("de-sitter", params, ("k",))
    k = _positive(params, "k", 1.0)
    coords = ("t", "x", "y", "z")
    s = "exp(sqrt(k)*t)^2"
    return _spec(coords, {(0, 0): "-1", (1, 1): s, (2, 2): s, (3, 3): s}, {"k": k}, ("1", "0", "0", "0"), f"de-sitter k={k!r}")


def _einstein_static(params):
    _check_keys("einstein-static", params, ("a0",))
    a0 = _positive(params, "a0", 1.0)
    coords = ("t", "chi", "theta", "phi")
    comps = {
        (0, 0): "-1",
        (1, 1): "a0^2",
        (2, 2): "a0^2*sin(chi)^2",
        (3, 3): "a0^2*sin(chi)^2*sin(theta)^2",
    }
    return _spec(coords, comps, {"a0": a0}, ("1", "0", "0", "0"), f"einstein-static a0={a0!r}")


def _schwarzschild(params):
    _check_keys("schwarzschild", params, ("M",))
    m = _positive(params, "M", 1.0)
    coords = ("t", "r", "theta", "phi")
    comps = {
        (0, 0): "-(1 - 2*M/r)",
        (1, 1): "1/(1 - 2*M/r)",
        (2, 2): "r^2",
        (3, 3): "r^2*sin(theta)^2",
    }
    hint = ("1/sqrt(1 - 2*M/r)", "0", "0", "0")
    return _spec(coords, comps, {"M": m}, hint, f"schwarzschild M={m!r}")


_BUILDERS = {
    "minkowski": _minkowski,
    "flrw-flat": _flrw_flat,
    "flrw-closed": lambda p: _flrw_curved("closed", p),
    "flrw-open": lambda p: _flrw_curved("open", p),
    "de-sitter": _de_sitter,
    "einstein-static": _einstein_static,
    "schwarzschild": _schwarzschild,
}

BUILTIN_NAMES = tuple(_BUILDERS)


def builtin(name, params=None):
    """Standard metric from the catalog, e.g. ``builtin("flrw-flat", {"a": "t^2"})``."""
    try:
        build = _BUILDERS[name]
    except KeyError:
        raise UnknownBuiltin(f"unknown builtin metric {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    return build(dict(params or {}))


def _box(*ranges):
    def sample(rng):
        return tuple(float(rng.uniform(lo, hi)) for lo, hi in ranges)
    return sample


# Catalog entries used by the verification suites: default parameters and a
# sampler for points well inside each chart.
CATALOG = {
    "minkowski": ({}, _box((-2, 2), (-2, 2), (-2, 2), (-2, 2))),
    "flrw-flat": ({"a": "t^2"}, _box((0.5, 2.0), (-2, 2), (-2, 2), (-2, 2))),
    "flrw-closed": ({"a": "t^2"}, _box((0.5, 2.0), (0.3, 2.8), (0.3, 2.8), (0, 6))),
    "flrw-open": ({"a": "t^2"}, _box((0.5, 2.0), (0.2, 2.0), (0.3, 2.8), (0, 6))),
    "de-sitter": ({"k": 1.0}, _box((-1, 1), (-2, 2), (-2, 2), (-2, 2))),
    "einstein-static": ({"a0": 1.0}, _box((-2, 2), (0.3, 2.8), (0.3, 2.8), (0, 6))),
    "schwarzschild": ({"M": 1.0}, _box((-2, 2), (3.0, 10.0), (0.3, 2.8), (0, 6))),
}


def catalog_specs():
    return {name: builtin(name, params) for name, (params, _) in CATALOG.items()}


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _as_point(spec, point):
    if isinstance(point, Mapping):
        missing = [c for c in spec.coordinates if c not in point]
        extra = [k for k in point if k not in spec.coordinates]
        if missing or extra:
            raise UnknownCoordinate(f"point must assign exactly {spec.coordinates}; missing {missing}, unknown {extra}")
        point = [point[c] for c in spec.coordinates]
    values = tuple(float(v) for v in point)
    if len(values) != DIM or not all(math.isfinite(v) for v in values):
        raise BadParameter(f"point needs {DIM} finite coordinates, got {point!r}")
    return values


def check_signature(g0):
    """Raise unless ``g0`` is a non-degenerate (-,+,+,+) symmetric matrix."""
    if not np.all(np.isfinite(g0)):
        raise SingularMetric("metric has non-finite components")
    eig = np.linalg.eigvalsh(g0)
    scale = max(1.0, float(np.max(np.abs(eig))))
    if np.min(np.abs(eig)) <= 1e-13 * scale:
        raise SingularMetric(f"metric is degenerate (eigenvalues {eig})")
    if not (eig[0] < 0 < eig[1]):
        raise SignatureError(f"metric signature is not (-,+,+,+): eigenvalues {eig}")


def eval_metric(spec, point):
    """Metric and inverse as jets at ``point``.

    ``point`` is a sequence of four reals or a mapping keyed by coordinate name.
    """
    x = _as_point(spec, point)
    env = {c: jet.Jet3.variable(i, x[i]) for i, c in enumerate(spec.coordinates)}
    g = np.zeros((jet.NCOEF, DIM, DIM))
    try:
        for (i, j), node in spec.components.items():
            coeffs = expr.evaluate(node, env, spec.parameters).coeffs
            g[:, i, j] = coeffs
            g[:, j, i] = coeffs
    except DivisionByZeroJet as exc:
        raise SingularMetric(f"metric component is singular at {dict(zip(spec.coordinates, x))}") from exc
    check_signature(g[0])
    det = float(np.linalg.det(g[0]))
    ginv = jet.matinv(g)
    ginv = 0.5 * (ginv + np.swapaxes(ginv, 1, 2))
    return MetricJet(g, ginv, x, det, spec.coordinates)


def metric_values(spec, point):
    """Plain float metric at ``point`` (no jets); used by finite-difference checks."""
    x = _as_point(spec, point)
    env = dict(zip(spec.coordinates, x))
    g = np.zeros((DIM, DIM))
    for (i, j), node in spec.components.items():
        g[i, j] = g[j, i] = expr.evaluate_scalar(node, env, spec.parameters)
    return g


def generator_jet(spec, point):
    """Contravariant generator hint as a jet array ``(35, 4)``, or None."""
    if spec.generator_hint is None:
        return None
    x = _as_point(spec, point)
    env = {c: jet.Jet3.variable(i, x[i]) for i, c in enumerate(spec.coordinates)}
    return np.stack([expr.evaluate(e, env, spec.parameters).coeffs for e in spec.generator_hint], axis=1)

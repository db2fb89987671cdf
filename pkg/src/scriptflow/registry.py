"""Component catalog: specs, name normalization and fuzzy resolution.

The catalog is a closed list of component specs.  Raw names coming from
documents or agent output are resolved in three steps: exact match on
the normalized name or an alias, fuzzy match when the minimum edit
distance is at most 2 with a unique minimizer, unknown otherwise (with
up to three nearest candidates for diagnostics).  Ties never resolve:
silently instantiating the wrong component is worse than reporting an
unknown one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .geometry.values import GeomValue, Number, Point, TextV, Vector

MAX_FUZZY_DISTANCE = 2
MAX_CANDIDATES = 3

VALUE_KINDS = frozenset(
    {"number", "integer", "point", "vector", "curve", "surface", "geometry-any", "text"}
)
CATEGORIES = frozenset({"params", "maths", "vector", "curve", "surface", "transform", "sets"})
DRAWABLE_KINDS = frozenset({"point", "curve", "surface"})

__all__ = [
    "CatalogError",
    "PortSpec",
    "ComponentSpec",
    "Catalog",
    "Resolution",
    "PortResolution",
    "normalize",
    "edit_distance",
    "resolve_name",
    "port_of",
    "is_coercible",
    "builtin_catalog",
    "load_catalog",
    "catalog_to_json",
    "VALUE_KINDS",
    "CATEGORIES",
    "DRAWABLE_KINDS",
]


class CatalogError(ValueError):
    """Malformed catalog data; the message names the offending entry."""


def normalize(name: str) -> str:
    """Case-fold and strip spaces, hyphens and underscores."""
    return "".join(ch for ch in name.casefold() if ch not in " -_")


def edit_distance(a: str, b: str, cap: int | None = None) -> int:
    """Levenshtein distance with an optional early-exit cap."""
    if a == b:
        return 0
    if cap is not None and abs(len(a) - len(b)) > cap:
        return cap + 1
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        best = i
        for j, cb in enumerate(b, start=1):
            cost = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            )
            current.append(cost)
            best = min(best, cost)
        if cap is not None and best > cap:
            return cap + 1
        previous = current
    return previous[-1]


@dataclass(frozen=True)
class PortSpec:
    """One input or output port of a component."""

    name: str
    kind: str
    cardinality: str = "scalar"
    required: bool = False
    default: GeomValue | None = None
    aliases: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in VALUE_KINDS:
            raise CatalogError(f"port {self.name!r}: unknown value kind {self.kind!r}")
        if self.cardinality not in ("scalar", "list"):
            raise CatalogError(f"port {self.name!r}: cardinality must be scalar or list")
        if self.required and self.default is not None:
            raise CatalogError(f"port {self.name!r}: required ports cannot carry a default")

    def matches(self, normalized: str) -> bool:
        return normalize(self.name) == normalized or any(
            normalize(a) == normalized for a in self.aliases
        )


@dataclass(frozen=True)
class ComponentSpec:
    name: str
    category: str
    inputs: tuple[PortSpec, ...]
    outputs: tuple[PortSpec, ...]
    aliases: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise CatalogError(f"component {self.name!r}: unknown category {self.category!r}")
        if not self.outputs:
            raise CatalogError(f"component {self.name!r}: needs at least one output port")
        for side in (self.inputs, self.outputs):
            seen: set[str] = set()
            for port in side:
                for label in (port.name, *port.aliases):
                    key = normalize(label)
                    if key in seen:
                        raise CatalogError(
                            f"component {self.name!r}: duplicate port name/alias {label!r}"
                        )
                    seen.add(key)

    def ports(self, side: str) -> tuple[PortSpec, ...]:
        if side == "in":
            return self.inputs
        if side == "out":
            return self.outputs
        raise ValueError(f"side must be 'in' or 'out', got {side!r}")

    def input(self, name: str) -> PortSpec | None:
        key = normalize(name)
        return next((p for p in self.inputs if p.matches(key)), None)

    def output(self, name: str) -> PortSpec | None:
        key = normalize(name)
        return next((p for p in self.outputs if p.matches(key)), None)


@dataclass(frozen=True)
class Resolution:
    """Outcome of resolving a raw component name against a catalog."""

    kind: str  # "exact" | "fuzzy" | "unknown"
    spec: ComponentSpec | None = None
    distance: int = 0
    nearest: tuple[ComponentSpec, ...] = ()

    @property
    def resolved(self) -> bool:
        return self.spec is not None


@dataclass(frozen=True)
class PortResolution:
    """Outcome of resolving a raw port name within one component side."""

    kind: str  # "exact" | "fuzzy" | "unknown"
    port: PortSpec | None = None
    distance: int = 0
    nearest: tuple[PortSpec, ...] = ()

    @property
    def resolved(self) -> bool:
        return self.port is not None


@dataclass(frozen=True)
class Catalog:
    version: str
    components: tuple[ComponentSpec, ...]
    repair_defaults: dict[tuple[str, str], GeomValue] = field(default_factory=dict)
    _index: dict[str, ComponentSpec] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: dict[str, ComponentSpec] = {}
        for spec in self.components:
            for label in (spec.name, *spec.aliases):
                key = normalize(label)
                if key in index:
                    raise CatalogError(
                        f"component {spec.name!r}: name or alias {label!r} already taken "
                        f"by {index[key].name!r}"
                    )
                index[key] = spec
        object.__setattr__(self, "_index", index)
        for component, port in self.repair_defaults:
            spec = index.get(normalize(component))
            if spec is None or spec.input(port) is None:
                raise CatalogError(f"repair default for unknown port {component!r}.{port!r}")

    def __len__(self) -> int:
        return len(self.components)

    def lookup(self, name: str) -> ComponentSpec | None:
        """Exact lookup by normalized name or alias."""
        return self._index.get(normalize(name))

    def repair_default(self, component: str, port: str) -> GeomValue | None:
        return self.repair_defaults.get((component, port))


def resolve_name(catalog: Catalog, raw: str) -> Resolution:
    """Resolve a raw component name: exact, fuzzy (distance <= 2, unique), or unknown."""
    if not raw.strip():
        raise ValueError("component name must be non-empty")
    key = normalize(raw)
    exact = catalog.lookup(raw)
    if exact is not None:
        return Resolution("exact", exact)
    best: dict[str, tuple[int, ComponentSpec]] = {}
    for spec in catalog.components:
        dist = min(
            edit_distance(key, normalize(label), cap=max(MAX_FUZZY_DISTANCE, 4))
            for label in (spec.name, *spec.aliases)
        )
        best[spec.name] = (dist, spec)
    ranked = sorted(best.values(), key=lambda pair: (pair[0], pair[1].name))
    nearest = tuple(spec for _, spec in ranked[:MAX_CANDIDATES])
    min_dist = ranked[0][0]
    if min_dist <= MAX_FUZZY_DISTANCE:
        minimizers = [spec for dist, spec in ranked if dist == min_dist]
        if len(minimizers) == 1:
            return Resolution("fuzzy", minimizers[0], min_dist, nearest)
        # ties fall through to unknown to avoid silent mis-instantiation
    return Resolution("unknown", None, min_dist, nearest)


def port_of(spec: ComponentSpec, side: str, raw: str) -> PortResolution:
    """Resolve a raw port name within one component side.

    Same policy as resolve_name: normalized exact match (name or alias),
    fuzzy when the minimum edit distance is <= 2 with a unique minimizer,
    unknown otherwise with up to three nearest candidates.
    """
    if not raw.strip():
        raise ValueError("port name must be non-empty")
    key = normalize(raw)
    ports = spec.ports(side)
    for port in ports:
        if port.matches(key):
            return PortResolution("exact", port, 0, (port,))
    ranked = sorted(
        (
            (
                min(
                    edit_distance(key, normalize(label), cap=MAX_FUZZY_DISTANCE)
                    for label in (port.name, *port.aliases)
                ),
                port,
            )
            for port in ports
        ),
        key=lambda pair: (pair[0], pair[1].name),
    )
    if not ranked:
        return PortResolution("unknown", None, len(key), ())
    nearest = tuple(port for _, port in ranked[:MAX_CANDIDATES])
    min_dist = ranked[0][0]
    if min_dist <= MAX_FUZZY_DISTANCE:
        minimizers = [port for dist, port in ranked if dist == min_dist]
        if len(minimizers) == 1:
            return PortResolution("fuzzy", minimizers[0], min_dist, nearest)
    return PortResolution("unknown", None, min_dist, nearest)


_COERCIONS: dict[str, frozenset[str]] = {
    # target kind -> accepted source kinds (beyond identity)
    "number": frozenset({"integer"}),
    "integer": frozenset({"number"}),
    "text": frozenset(VALUE_KINDS - {"text"}),
    "geometry-any": frozenset({"point", "curve", "surface"}),
}


def is_coercible(source: str, target: str) -> bool:
    """True when a value of kind `source` may feed a port of kind `target`.

    Identity always holds.  integer<->number convert, anything formats
    to text, and drawable geometry widens to geometry-any.  point and
    vector deliberately do not interconvert, and geometry-any does not
    narrow to a concrete kind without an inference step.
    """
    if source == target:
        return True
    return source in _COERCIONS.get(target, frozenset())


def _num_port(name: str, default: float | None = 0.0, *, required: bool = False,
              aliases: tuple[str, ...] = (), kind: str = "number",
              cardinality: str = "scalar") -> PortSpec:
    return PortSpec(
        name,
        kind,
        cardinality,
        required,
        None if required or default is None else Number(default),
        aliases,
    )


def builtin_catalog() -> Catalog:
    """The built-in closed catalog (26 components)."""
    components = (
        ComponentSpec(
            "Number Slider", "params",
            inputs=(_num_port("N", 0.0, aliases=("Value",)),),
            outputs=(PortSpec("N", "number", aliases=("Value",)),),
            aliases=("Slider",),
        ),
        ComponentSpec(
            "Panel", "params",
            inputs=(PortSpec("Content", "text", "list", False, TextV(""), ("Input",)),),
            outputs=(PortSpec("Content", "text", aliases=("Output",)),),
        ),
        ComponentSpec(
            "Construct Point", "vector",
            inputs=(_num_port("X"), _num_port("Y"), _num_port("Z")),
            outputs=(PortSpec("Pt", "point", aliases=("Point", "P")),),
            aliases=("Point",),
        ),
        ComponentSpec(
            "Unit X", "vector",
            inputs=(_num_port("Factor", 1.0, aliases=("F",)),),
            outputs=(PortSpec("V", "vector", aliases=("Vector",)),),
        ),
        ComponentSpec(
            "Unit Y", "vector",
            inputs=(_num_port("Factor", 1.0, aliases=("F",)),),
            outputs=(PortSpec("V", "vector", aliases=("Vector",)),),
        ),
        ComponentSpec(
            "Unit Z", "vector",
            inputs=(_num_port("Factor", 1.0, aliases=("F",)),),
            outputs=(PortSpec("V", "vector", aliases=("Vector",)),),
        ),
        ComponentSpec(
            "Vector XYZ", "vector",
            inputs=(_num_port("X"), _num_port("Y"), _num_port("Z")),
            outputs=(PortSpec("V", "vector", aliases=("Vector",)),),
        ),
        ComponentSpec(
            "Line", "curve",
            inputs=(
                PortSpec("Start", "point", required=True, aliases=("A", "Start Point")),
                PortSpec("End", "point", required=True, aliases=("B", "End Point")),
            ),
            outputs=(PortSpec("L", "curve", aliases=("Line",)),),
        ),
        ComponentSpec(
            "Line SDL", "curve",
            inputs=(
                PortSpec("Start", "point", required=True, aliases=("S", "Start Point")),
                PortSpec("Direction", "vector", required=True, aliases=("D",)),
                _num_port("Length", 1.0, aliases=("L",)),
            ),
            outputs=(PortSpec("L", "curve", aliases=("Line",)),),
        ),
        ComponentSpec(
            "Polyline", "curve",
            inputs=(PortSpec("Vertices", "point", "list", required=True, aliases=("V", "Points")),),
            outputs=(PortSpec("Pl", "curve", aliases=("Polyline",)),),
        ),
        ComponentSpec(
            "Circle", "curve",
            inputs=(
                PortSpec("Center", "point", default=Point(0.0, 0.0, 0.0), aliases=("C",)),
                PortSpec("Normal", "vector", default=Vector(0.0, 0.0, 1.0), aliases=("N",)),
                PortSpec("Radius", "number", required=True, aliases=("R",)),
            ),
            outputs=(PortSpec("C", "curve", aliases=("Circle",)),),
        ),
        ComponentSpec(
            "Series", "sets",
            inputs=(
                _num_port("Start", 0.0, aliases=("S",)),
                _num_port("Step", 1.0, aliases=("N",)),
                _num_port("Count", 10.0, aliases=("C",), kind="integer"),
            ),
            outputs=(PortSpec("Series", "number", "list", aliases=("S",)),),
        ),
        ComponentSpec(
            "Range", "sets",
            inputs=(
                _num_port("Start", 0.0),
                _num_port("End", 1.0, aliases=("E",)),
                _num_port("Steps", 10.0, aliases=("N",), kind="integer"),
            ),
            outputs=(PortSpec("Range", "number", "list", aliases=("R",)),),
        ),
        ComponentSpec(
            "Divide Curve", "curve",
            inputs=(
                PortSpec("Curve", "curve", required=True, aliases=("C",)),
                _num_port("Count", 10.0, aliases=("N",), kind="integer"),
            ),
            outputs=(PortSpec("Points", "point", "list", aliases=("P",)),),
        ),
        ComponentSpec(
            "Move", "transform",
            inputs=(
                PortSpec("Geometry", "geometry-any", required=True, aliases=("G",)),
                PortSpec("Motion", "vector", required=True, aliases=("T", "Translation")),
            ),
            outputs=(PortSpec("Geometry", "geometry-any", aliases=("G",)),),
            aliases=("Translate",),
        ),
        ComponentSpec(
            "Extrude Linear", "surface",
            inputs=(
                PortSpec("Profile", "curve", required=True, aliases=("P", "Base")),
                PortSpec("Axis", "vector", required=True, aliases=("A", "Direction")),
            ),
            outputs=(PortSpec("Surface", "surface", aliases=("S",)),),
            aliases=("Extrude",),
        ),
        ComponentSpec(
            "Loft", "surface",
            inputs=(PortSpec("Curves", "curve", "list", required=True, aliases=("C", "Sections")),),
            outputs=(PortSpec("Surface", "surface", aliases=("L",)),),
        ),
        ComponentSpec(
            "Nurbs Curve", "curve",
            inputs=(
                PortSpec("Vertices", "point", "list", required=True,
                         aliases=("V", "Points", "Control Points")),
                _num_port("Degree", 3.0, aliases=("D",), kind="integer"),
            ),
            outputs=(PortSpec("Curve", "curve", aliases=("C",)),),
            aliases=("NURBS",),
        ),
        ComponentSpec(
            "Interpolate Curve", "curve",
            inputs=(
                PortSpec("Vertices", "point", "list", required=True, aliases=("V", "Points")),
                _num_port("Degree", 3.0, aliases=("D",), kind="integer"),
            ),
            outputs=(PortSpec("Curve", "curve", aliases=("C",)),),
            aliases=("Interpolate",),
        ),
        ComponentSpec(
            "Addition", "maths",
            inputs=(_num_port("A"), _num_port("B")),
            outputs=(PortSpec("Result", "number", aliases=("R",)),),
            aliases=("Add", "Plus"),
        ),
        ComponentSpec(
            "Subtraction", "maths",
            inputs=(_num_port("A"), _num_port("B")),
            outputs=(PortSpec("Result", "number", aliases=("R",)),),
            aliases=("Subtract", "Minus"),
        ),
        ComponentSpec(
            "Multiplication", "maths",
            inputs=(_num_port("A", 1.0), _num_port("B", 1.0)),
            outputs=(PortSpec("Result", "number", aliases=("R",)),),
            aliases=("Multiply",),
        ),
        ComponentSpec(
            "Division", "maths",
            inputs=(_num_port("A"), _num_port("B", 1.0)),
            outputs=(PortSpec("Result", "number", aliases=("R",)),),
            aliases=("Divide",),
        ),
        ComponentSpec(
            "Negative", "maths",
            inputs=(_num_port("Value", 0.0, aliases=("X",)),),
            outputs=(PortSpec("Result", "number", aliases=("Y",)),),
            aliases=("Negate",),
        ),
        ComponentSpec(
            "Merge", "sets",
            inputs=(
                PortSpec("A", "geometry-any", "list", required=True, aliases=("D1",)),
                PortSpec("B", "geometry-any", "list", required=True, aliases=("D2",)),
            ),
            outputs=(PortSpec("Result", "geometry-any", "list", aliases=("R",)),),
        ),
        ComponentSpec(
            "List Item", "sets",
            inputs=(
                PortSpec("List", "geometry-any", "list", required=True, aliases=("L",)),
                _num_port("Index", 0.0, aliases=("i",), kind="integer"),
            ),
            outputs=(PortSpec("Item", "geometry-any", aliases=("I",)),),
            aliases=("Item",),
        ),
    )
    return Catalog(
        version="1",
        components=components,
        repair_defaults={("Circle", "Radius"): Number(1.0)},
    )


_KIND_PARSERS = {
    "number": lambda v: Number(float(v["value"])),
    "text": lambda v: TextV(str(v["value"])),
    "point": lambda v: Point(*map(float, v["xyz"])),
    "vector": lambda v: Vector(*map(float, v["xyz"])),
}


def _default_from_json(value: object, where: str) -> GeomValue:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Number(float(value))
    if isinstance(value, str):
        return TextV(value)
    if isinstance(value, dict) and value.get("kind") in _KIND_PARSERS:
        try:
            return _KIND_PARSERS[value["kind"]](value)
        except (KeyError, TypeError, ValueError) as exc:
            raise CatalogError(f"{where}: bad default value: {exc}") from exc
    raise CatalogError(f"{where}: unsupported default {value!r}")


def _default_to_json(value: GeomValue):
    if isinstance(value, Number):
        return value.value
    if isinstance(value, TextV):
        return value.value
    if isinstance(value, Point):
        return {"kind": "point", "xyz": [value.x, value.y, value.z]}
    if isinstance(value, Vector):
        return {"kind": "vector", "xyz": [value.x, value.y, value.z]}
    raise CatalogError(f"unsupported catalog default {value!r}")


def _port_from_json(entry: object, where: str) -> PortSpec:
    if not isinstance(entry, dict):
        raise CatalogError(f"{where}: port must be an object")
    try:
        name = entry["name"]
        kind = entry["kind"]
    except KeyError as exc:
        raise CatalogError(f"{where}: port missing key {exc}") from exc
    default = entry.get("default")
    return PortSpec(
        name,
        kind,
        entry.get("cardinality", "scalar"),
        bool(entry.get("required", False)),
        None if default is None else _default_from_json(default, f"{where}.{name}"),
        tuple(entry.get("aliases", ())),
    )


def load_catalog(path: str | Path | None = None) -> Catalog:
    """Load a catalog from a JSON file, or the built-in catalog when path is None."""
    if path is None:
        return builtin_catalog()
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog {path}: invalid JSON at offset {exc.pos}: {exc.msg}") from exc
    if not isinstance(data, dict) or "components" not in data:
        raise CatalogError(f"catalog {path}: expected an object with a 'components' array")
    components = []
    for i, entry in enumerate(data["components"]):
        where = f"catalog {path}: components[{i}]"
        if not isinstance(entry, dict) or "name" not in entry:
            raise CatalogError(f"{where}: component entries need a 'name'")
        name = entry["name"]
        try:
            components.append(
                ComponentSpec(
                    name,
                    entry.get("category", "params"),
                    tuple(
                        _port_from_json(p, f"{where} ({name}) input")
                        for p in entry.get("inputs", ())
                    ),
                    tuple(
                        _port_from_json(p, f"{where} ({name}) output")
                        for p in entry.get("outputs", ())
                    ),
                    tuple(entry.get("aliases", ())),
                )
            )
        except CatalogError:
            raise
        except (TypeError, ValueError) as exc:
            raise CatalogError(f"{where} ({name}): {exc}") from exc
    repair_defaults = {}
    for component, ports in data.get("repair_defaults", {}).items():
        for port, value in ports.items():
            repair_defaults[(component, port)] = _default_from_json(
                value, f"catalog {path}: repair_defaults[{component}][{port}]"
            )
    return Catalog(str(data.get("version", "1")), tuple(components), repair_defaults)


def catalog_to_json(catalog: Catalog) -> dict:
    """Catalog file representation (also the GET /registry payload)."""
    def port_json(port: PortSpec) -> dict:
        out: dict = {"name": port.name, "kind": port.kind, "cardinality": port.cardinality,
                     "required": port.required}
        if port.default is not None:
            out["default"] = _default_to_json(port.default)
        if port.aliases:
            out["aliases"] = list(port.aliases)
        return out

    data: dict = {
        "schema_version": 1,
        "version": catalog.version,
        "components": [
            {
                "name": spec.name,
                "aliases": list(spec.aliases),
                "category": spec.category,
                "inputs": [port_json(p) for p in spec.inputs],
                "outputs": [port_json(p) for p in spec.outputs],
            }
            for spec in catalog.components
        ],
    }
    if catalog.repair_defaults:
        defaults: dict[str, dict[str, object]] = {}
        for (component, port), value in sorted(catalog.repair_defaults.items()):
            defaults.setdefault(component, {})[port] = _default_to_json(value)
        data["repair_defaults"] = defaults
    return data

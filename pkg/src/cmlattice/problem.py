"""Problem files: a small YAML document describing a cone and an order ideal.

Schema (version 1)::

    schema: 1
    field: q                 # q | rationals | p:N
    generators:              # integer vectors, one per semigroup generator
      - [0, 0, 1]
      - [0, 1, 1]
    complex: all             # or {delta_seeds: [[i, j], ...]}
                             # or {ideal_exponents: [[a1, ..., ad], ...]}
    sigma: {delta_seeds: [[0]]}   # optional, same forms as complex
    normality_box: 3         # optional

Face seeds are generator-index sets (0-based) and are resolved by saturation.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Any

import yaml

from .complexes import (
    IdealPair,
    OrderIdeal,
    full_ideal,
    order_ideal_from_generator_sets,
    order_ideal_from_ideal_generators,
)
from .cone import NormalityNotVerified, SemigroupCone, build_cone
from .errors import CmLatticeError, ParseError, ValidationError
from .linalg import QQ, FieldConfig

SCHEMA_VERSION = 1
_KEYS = {"schema", "field", "generators", "complex", "sigma", "normality_box"}


@dataclass(frozen=True)
class ComplexSpec:
    kind: str  # "all" | "delta_seeds" | "ideal_exponents"
    data: tuple[tuple[int, ...], ...] = ()

    def to_yaml(self):
        if self.kind == "all":
            return "all"
        return {self.kind: [list(x) for x in self.data]}


@dataclass(frozen=True)
class ProblemSpec:
    field: FieldConfig
    generators: tuple[tuple[int, ...], ...]
    complex: ComplexSpec
    sigma: ComplexSpec | None = None
    normality_box: int | None = None

    def build_cone(self, field: FieldConfig | None = None, normality_box: int | None = None) -> SemigroupCone:
        box = normality_box if normality_box is not None else self.normality_box
        fld = field or self.field
        if box is not None:
            return build_cone(self.generators, fld, normality_box=box)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NormalityNotVerified)
            return build_cone(self.generators, fld)

    def resolve(self, cone: SemigroupCone, which: ComplexSpec) -> OrderIdeal:
        if which.kind == "all":
            return full_ideal(cone)
        if which.kind == "delta_seeds":
            for seed in which.data:
                bad = [i for i in seed if not 0 <= i < len(cone.generators)]
                if bad:
                    raise ValidationError(f"generator index {bad[0]} out of range", "index-out-of-range")
            return order_ideal_from_generator_sets(cone, which.data)
        return order_ideal_from_ideal_generators(cone, which.data)

    def build(self, field: FieldConfig | None = None, normality_box: int | None = None):
        """Return (cone, delta, pair); ``pair`` is None without a sigma entry."""
        cone = self.build_cone(field, normality_box)
        delta = self.resolve(cone, self.complex)
        pair = None
        if self.sigma is not None:
            pair = IdealPair(delta, self.resolve(cone, self.sigma))
        return cone, delta, pair

    def to_text(self) -> str:
        doc: dict[str, Any] = {
            "schema": SCHEMA_VERSION,
            "field": self.field.label,
            "generators": [list(g) for g in self.generators],
            "complex": self.complex.to_yaml(),
        }
        if self.sigma is not None:
            doc["sigma"] = self.sigma.to_yaml()
        if self.normality_box is not None:
            doc["normality_box"] = self.normality_box
        return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


# --- parsing -----------------------------------------------------------------------

class _Located:
    """Converts a composed YAML node tree to Python values, remembering line numbers."""

    def __init__(self):
        self.lines: dict[str, int] = {}

    def convert(self, node, path: str):
        self.lines[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            out = {}
            for k, v in node.value:
                key = yaml.safe_load(yaml.serialize(k)) if not isinstance(k, yaml.ScalarNode) else k.value
                sub = f"{path}.{key}" if path else str(key)
                out[key] = self.convert(v, sub)
            return out
        if isinstance(node, yaml.SequenceNode):
            return [self.convert(v, f"{path}[{i}]") for i, v in enumerate(node.value)]
        return yaml.safe_load(yaml.serialize(node))

    def error(self, path: str, msg: str, cls=ParseError, code: str | None = None):
        line = self.lines.get(path)
        loc = f"line {line}, {path}" if line else path
        if cls is ParseError:
            return ParseError(msg, loc, code or "parse")
        return cls(f"{loc}: {msg}", code) if code else cls(f"{loc}: {msg}")


def _int(ctx: _Located, v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ctx.error(path, f"expected an integer, got {v!r}", code="type")
    return v


def _vectors(ctx: _Located, v, path: str, length: int | None = None) -> tuple[tuple[int, ...], ...]:
    if not isinstance(v, list) or not v:
        raise ctx.error(path, "expected a non-empty list of integer vectors", code="type")
    out = []
    for i, row in enumerate(v):
        p = f"{path}[{i}]"
        if not isinstance(row, list):
            raise ctx.error(p, "expected a list of integers", code="type")
        vec = tuple(_int(ctx, x, f"{p}[{j}]") for j, x in enumerate(row))
        if length is not None and len(vec) != length:
            raise ctx.error(p, f"expected length {length}, got {len(vec)}", ValidationError, "length-mismatch")
        out.append(vec)
    return tuple(out)


def _complex(ctx: _Located, v, path: str, d: int) -> ComplexSpec:
    if v == "all":
        return ComplexSpec("all")
    if isinstance(v, dict) and len(v) == 1:
        (kind, data), = v.items()
        if kind == "delta_seeds":
            if not isinstance(data, list):
                raise ctx.error(f"{path}.{kind}", "expected a list of index lists", code="type")
            seeds = []
            for i, s in enumerate(data):
                p = f"{path}.{kind}[{i}]"
                if not isinstance(s, list):
                    raise ctx.error(p, "expected a list of generator indices", code="type")
                seeds.append(tuple(sorted({_int(ctx, x, f"{p}[{j}]") for j, x in enumerate(s)})))
            return ComplexSpec(kind, tuple(seeds))
        if kind == "ideal_exponents":
            return ComplexSpec(kind, _vectors(ctx, data, f"{path}.{kind}", d))
    raise ctx.error(path, "expected 'all', {delta_seeds: ...} or {ideal_exponents: ...}", code="type")


def parse_problem(text: str) -> ProblemSpec:
    try:
        node = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        loc = f"line {mark.line + 1}" if mark else "document"
        raise ParseError(str(getattr(e, "problem", None) or e), loc, "syntax") from None
    ctx = _Located()
    if node is None:
        raise ParseError("empty problem file", "document", "empty")
    doc = ctx.convert(node, "")
    if not isinstance(doc, dict):
        raise ctx.error("", "top level must be a mapping", code="type")
    unknown = sorted(set(map(str, doc)) - _KEYS)
    if unknown:
        raise ctx.error(unknown[0], f"unknown key {unknown[0]!r}", code="unknown-key")
    for key in ("schema", "generators", "complex"):
        if key not in doc:
            raise ParseError(f"missing required key {key!r}", key, "missing-key")
    if doc["schema"] != SCHEMA_VERSION:
        raise ctx.error("schema", f"unsupported schema {doc['schema']!r}", code="schema")

    fld = QQ
    if "field" in doc:
        try:
            fld = FieldConfig.parse(str(doc["field"]))
        except CmLatticeError as e:
            raise ctx.error("field", str(e), ValidationError, e.code) from None
    gens = _vectors(ctx, doc["generators"], "generators")
    d = len(gens[0])
    for i, g in enumerate(gens):
        if len(g) != d:
            raise ctx.error(f"generators[{i}]", f"expected length {d}, got {len(g)}",
                            ValidationError, "length-mismatch")
    cx = _complex(ctx, doc["complex"], "complex", d)
    sigma = _complex(ctx, doc["sigma"], "sigma", d) if doc.get("sigma") is not None else None
    box = None
    if doc.get("normality_box") is not None:
        box = _int(ctx, doc["normality_box"], "normality_box")
        if box < 0:
            raise ctx.error("normality_box", "must be non-negative", ValidationError, "negative-box")
    return ProblemSpec(fld, gens, cx, sigma, box)


def validate_problem(spec: ProblemSpec) -> None:
    """Build everything once so geometric errors surface before any command runs."""
    spec.build()

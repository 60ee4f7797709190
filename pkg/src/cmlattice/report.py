"""Report documents: JSON and aligned text renderings of a command's result.

A report is a plain value object.  Everything inside it is already
JSON-compatible (infinities are stored as the strings "inf" and "-inf"), so
``ReportDocument.from_json(doc.to_json()) == doc`` holds exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

SCHEMA_VERSION = 1

# One line per verdict kind; printed next to every verdict so a reader can
# audit which criterion produced it.
CRITERIA = {
    "dim": "max cone_dim F over faces with M_c(F) != 0",
    "depth": "min(cone_dim F + i) over nonzero nu_i(P_F)",
    "cm": "nu_i(P_F) = 0 unless cone_dim F = dim M - i",
    "serre_max": "largest n with nu_i(P_F) = 0 for i < n unless cone_dim F = dim - i",
    "gcm": "Ext^(d-i)(M, omega) supported at the origin for all i < dim M",
    "buchsbaum": "equivalent to gcm for squarefree modules",
    "seqcm": "every nonzero Ext^j(M, omega) is CM of dimension d - j",
    "seqcm_route_ext": "every nonzero Ext^j(M, omega) is CM of dimension d - j",
    "seqcm_route_duval": "every pure skeleton of the order ideal is CM",
    "seqcm_route_filtration": "every pure-skeleton filtration pair is CM",
    "gorenstein_star": "CM and omega has value K on every face of the order ideal",
    "cm_pair": "nu-table of the pair module is concentrated on cone_dim F = dim - i",
    "local_coh0": "dim H^(d-i)(E_0(M)), cross-checked against cellular sheaf cohomology",
    "simplicial": "number of rays equals the dimension",
    "normality": "every lattice point of the cone in the box is a sum of generators",
    "psi_member": "some generator g has supp+(g) contained in supp+(-a)",
    "in_cone": "all facet normals are non-negative on a",
    "regular": "[H^0_m]_0 = [H^1_m]_0 = 0 after replacing M_0 by global sections",
    "nu_dim": "max dim R/W over entries with i = 0",
    "nu_depth": "min(dim R/W + i) over the nu-table",
    "nu_cm": "all entries satisfy p - i <= dim R/W <= p",
    "nu_serre_max": "largest n with no entry dim R/W < p - i for i < n",
    "nu_gcm": "no entry with 0 < dim R/W < p - i",
    "nu_buchsbaum_sufficient": "no entry with dim R/W < p - i apart from W = m",
}


def encode(x: Any) -> Any:
    """Make a value JSON-safe: infinities become strings, tuples become lists."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if isinstance(x, frozenset | set):
        return sorted(encode(v) for v in x)
    return x


@dataclass
class Verdict:
    name: str
    value: Any
    criterion: str

    def __post_init__(self):
        self.value = encode(self.value)


def verdict(name: str, value: Any) -> Verdict:
    return Verdict(name, value, CRITERIA[name])


@dataclass
class NuEntry:
    i: int
    face: list[int]  # generator indices of P_F's face
    cone_dim: int
    mult: int


@dataclass
class ReportDocument:
    command: str
    field: str
    generators: list[list[int]]
    verdicts: list[Verdict] = field(default_factory=list)
    nu_table: list[NuEntry] | None = None
    seqcm_routes: dict[str, bool] | None = None
    local_coh0: list[int] | None = None
    data: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    schema: int = SCHEMA_VERSION

    def __post_init__(self):
        self.generators = [list(g) for g in self.generators]
        self.data = json.loads(json.dumps(encode(self.data)))

    def get(self, name: str) -> Any:
        for v in self.verdicts:
            if v.name == name:
                return v.value
        raise KeyError(name)

    # --- serialization ----------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        order = ["schema", "command", "field", "generators", "verdicts", "nu_table",
                 "seqcm_routes", "local_coh0", "data", "notes"]
        return {k: d[k] for k in order}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ReportDocument":
        nu = d.get("nu_table")
        return cls(
            command=d["command"],
            field=d["field"],
            generators=d["generators"],
            verdicts=[Verdict(**v) for v in d.get("verdicts", [])],
            nu_table=None if nu is None else [NuEntry(**e) for e in nu],
            seqcm_routes=d.get("seqcm_routes"),
            local_coh0=d.get("local_coh0"),
            data=d.get("data", {}),
            notes=list(d.get("notes", [])),
            schema=d.get("schema", SCHEMA_VERSION),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        out = [f"cmlattice report (schema {self.schema})",
               f"command     {self.command}",
               f"field       {self.field}",
               f"generators  {' '.join(_vec(g) for g in self.generators)}"]
        if self.verdicts:
            rows = [(v.name, _fmt(v.value), v.criterion) for v in self.verdicts]
            out += ["", "verdicts"] + _table(("name", "value", "criterion"), rows)
        if self.seqcm_routes is not None:
            rows = [(k, _fmt(v), CRITERIA.get(f"seqcm_route_{k}", "")) for k, v in self.seqcm_routes.items()]
            out += ["", "sequentially CM routes"] + _table(("route", "value", "criterion"), rows)
        if self.local_coh0 is not None:
            rows = [(str(i), str(n)) for i, n in enumerate(self.local_coh0)]
            out += ["", "degree-0 local cohomology"] + _table(("i", "dim [H^i_m]_0"), rows)
        if self.nu_table is not None:
            rows = [(str(e.i), _set(e.face), str(e.cone_dim), str(e.mult)) for e in self.nu_table]
            out += ["", "nu-table"] + _table(("i", "face", "cone_dim", "nu"), rows)
        for key, value in self.data.items():
            out += ["", key] + _render(value)
        if self.notes:
            out += ["", "notes"] + [f"  - {n}" for n in self.notes]
        return "\n".join(out) + "\n"


def _vec(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def _set(s) -> str:
    return "{" + ",".join(str(x) for x in s) + "}"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "-"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _table(header: tuple[str, ...], rows: list[tuple[str, ...]]) -> list[str]:
    if not rows:
        return ["  (empty)"]
    widths = [max(len(r[k]) for r in [header, *rows]) for k in range(len(header))]
    line = lambda r: "  " + "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    return [line(header), line(tuple("-" * w for w in widths))] + [line(r) for r in rows]


def _render(value) -> list[str]:
    if isinstance(value, list) and value and all(isinstance(x, dict) for x in value):
        keys = list(value[0])
        return _table(tuple(keys), [tuple(_fmt(x.get(k)) for k in keys) for x in value])
    if isinstance(value, dict):
        rows = [(str(k), _fmt(v)) for k, v in value.items()]
        return _table(("key", "value"), rows)
    return ["  " + _fmt(value)]

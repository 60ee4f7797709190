"""Command-line front end: ``cmlattice <command> [options]``.

Exit codes: 0 success, 1 self-check failure, 2 invalid input,
3 internal inconsistency (two independent computations disagreed).
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import yaml

from .analysis import (
    analyze,
    analyze_module,
    analyze_nu_table,
    is_cm_pair,
    is_cohen_macaulay,
    is_gorenstein_star,
    linear_strand_profile,
    local_cohomology_deg0,
    finite_length_profile,
    nu_table,
    seq_cm,
)
from .complexes import AbstractNuTable, IdealPair, NuTable, SqModule, face_ring, pair_module, regularize
from .cone import (
    SemigroupCone,
    face_of_point,
    is_simplicial,
    lattice_membership,
    psi_membership,
    supp_plus,
    verify_normality_bounded,
)
from .errors import CmLatticeError, InternalInconsistency, ParseError, ValidationError
from .linalg import FieldConfig
from .problem import ProblemSpec, parse_problem
from .report import NuEntry, ReportDocument, verdict
from .selfcheck import cone_builder, selfcheck

COMMANDS = (
    "faces", "analyze", "pair", "nu", "seqcm", "gorenstein", "localcoh0",
    "psi", "regularize", "nu-analyze", "selfcheck",
)
NEEDS_INPUT = set(COMMANDS) - {"nu-analyze", "selfcheck"}


@dataclass
class Options:
    field: FieldConfig | None = None
    normality_box: int | None = None
    point: tuple[int, ...] | None = None
    table: str | None = None
    p: int | None = None
    simplicial: bool = False


# --- helpers --------------------------------------------------------------------

def _gens(cone: SemigroupCone, fid: int) -> list[int]:
    return sorted(cone.face(fid).generator_set)


def _nu_entries(table: NuTable) -> list[NuEntry]:
    cone = table.cone
    return [NuEntry(i, _gens(cone, f), cone.face(f).cone_dim, n) for (i, f), n in table.items()]


def _module(delta, pair: IdealPair | None) -> SqModule:
    return pair_module(pair) if pair is not None else face_ring(delta)


def _delta_data(delta, pair: IdealPair | None) -> dict:
    cone = delta.cone
    out = {"delta_facets": [_gens(cone, f) for f in delta.facets()]}
    if pair is not None:
        out["sigma_facets"] = [_gens(cone, f) for f in pair.sigma.facets()]
    return out


def _base(command: str, cone: SemigroupCone, fld: FieldConfig) -> ReportDocument:
    return ReportDocument(command=command, field=fld.label, generators=[list(g) for g in cone.generators])


# --- commands ------------------------------------------------------------------

def _faces(doc, cone, delta, pair, opts, box):
    faces = [
        {"generators": _gens(cone, f.id), "zero_set": sorted(f.facet_zero_set),
         "cone_dim": f.cone_dim, "interior_point": list(f.interior_point)}
        for f in cone.faces
    ]
    doc.verdicts.append(verdict("simplicial", is_simplicial(cone)))
    if box is not None:
        v = verify_normality_bounded(cone, box)
        doc.verdicts.append(verdict("normality", v.consistent))
        doc.data["normality_box"] = box
    else:
        doc.notes.append("normality assumed, not verified (pass --normality-box N)")
    doc.data["facet_normals"] = [list(h) for h in cone.facet_normals]
    doc.data["faces"] = faces


def _analysis_verdicts(doc, rep, with_delta: bool):
    doc.verdicts += [verdict("dim", rep.dim), verdict("depth", rep.depth), verdict("cm", rep.cm)]
    if with_delta:
        doc.verdicts.append(verdict("serre_max", rep.serre_max))
    doc.verdicts += [verdict("gcm", rep.gcm), verdict("buchsbaum", rep.buchsbaum),
                     verdict("seqcm", bool(rep.seqcm))]
    if with_delta:
        doc.verdicts.append(verdict("gorenstein_star", rep.gorenstein_star))
        s = rep.seqcm
        doc.seqcm_routes = {"ext": s.route_ext, "duval": s.route_duval, "filtration": s.route_filtration}
        if rep.serre_max is not None and rep.serre_max < 2:
            doc.notes.append("serre_max below 2 is not characterized by the nu-table criterion")
    doc.nu_table = _nu_entries(rep.nu)
    doc.local_coh0 = list(rep.local_coh0)
    doc.data["finite_length"] = {str(i): v for i, v in rep.finite_length.items()}
    doc.data["ir_dim"] = rep.ir_dim


def _analyze(doc, cone, delta, pair, opts, box):
    if pair is not None:
        rep = analyze_module(pair_module(pair))
        _analysis_verdicts(doc, rep, with_delta=False)
        doc.notes.append("sigma given: module-level verdicts for the pair module")
    else:
        _analysis_verdicts(doc, analyze(delta), with_delta=True)
    doc.data.update(_delta_data(delta, pair))


def _pair(doc, cone, delta, pair, opts, box):
    if pair is None:
        raise ValidationError("the pair command needs a sigma entry in the problem file", "missing-sigma")
    doc.verdicts.append(verdict("cm_pair", is_cm_pair(pair)))
    _analysis_verdicts(doc, analyze_module(pair_module(pair)), with_delta=False)
    doc.data.update(_delta_data(delta, pair))


def _nu(doc, cone, delta, pair, opts, box):
    table = nu_table(_module(delta, pair))
    doc.nu_table = _nu_entries(table)
    doc.data["ir_dim"] = table.ir_dim
    doc.data.update(_delta_data(delta, pair))


def _seqcm(doc, cone, delta, pair, opts, box):
    s = seq_cm(delta)
    doc.verdicts.append(verdict("seqcm", s.value))
    doc.seqcm_routes = {"ext": s.route_ext, "duval": s.route_duval, "filtration": s.route_filtration}
    strands = linear_strand_profile(face_ring(delta))
    doc.data["linear_strands"] = [
        {"l": l, "acyclic": p.acyclic, "term_dims": list(p.term_dims)} for l, p in sorted(strands.items())
    ]
    doc.data.update(_delta_data(delta, pair))


def _gorenstein(doc, cone, delta, pair, opts, box):
    doc.verdicts.append(verdict("cm", is_cohen_macaulay(face_ring(delta))))
    doc.verdicts.append(verdict("gorenstein_star", is_gorenstein_star(delta)))
    doc.data.update(_delta_data(delta, pair))


def _localcoh0(doc, cone, delta, pair, opts, box):
    m = _module(delta, pair)
    doc.local_coh0 = local_cohomology_deg0(m)
    doc.data["finite_length"] = {str(i): v for i, v in finite_length_profile(m).items()}
    doc.data.update(_delta_data(delta, pair))


def _psi(doc, cone, delta, pair, opts, box):
    a = opts.point
    if a is None:
        raise ValidationError("psi needs --point v1,v2,...", "missing-point")
    if len(a) != cone.dim:
        raise ValidationError(f"point has length {len(a)}, expected {cone.dim}", "length-mismatch")
    inside = lattice_membership(cone, a)
    doc.verdicts.append(verdict("psi_member", psi_membership(cone, a)))
    doc.verdicts.append(verdict("in_cone", inside))
    doc.data["point"] = list(a)
    doc.data["supp_plus"] = {
        "a": sorted(supp_plus(cone, a)),
        "minus_a": sorted(supp_plus(cone, [-x for x in a])),
    }
    if inside:
        doc.data["face_of_point"] = _gens(cone, face_of_point(cone, a))


def _regularize(doc, cone, delta, pair, opts, box):
    m = _module(delta, pair)
    reg = regularize(m)
    lc = local_cohomology_deg0(reg)
    doc.local_coh0 = lc
    if cone.dim >= 2:
        doc.verdicts.append(verdict("regular", lc[0] == 0 and lc[1] == 0))
    doc.data["values"] = [
        {"face": _gens(cone, f.id), "cone_dim": f.cone_dim,
         "before": m.value_dim(f.id), "after": reg.value_dim(f.id)}
        for f in cone.faces if m.value_dim(f.id) or reg.value_dim(f.id)
    ]
    doc.data.update(_delta_data(delta, pair))


_DISPATCH = {
    "faces": _faces, "analyze": _analyze, "pair": _pair, "nu": _nu, "seqcm": _seqcm,
    "gorenstein": _gorenstein, "localcoh0": _localcoh0, "psi": _psi, "regularize": _regularize,
}


def _load_table(path: str) -> AbstractNuTable:
    """Table file: ``{schema: 1, prime_components: bool, entries: [{i, dim, mult}]}``."""
    try:
        doc = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ParseError(str(e), path, "syntax") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise ParseError("expected a mapping with an 'entries' list", path, "type")
    entries: dict[tuple[int, int], int] = {}
    for k, e in enumerate(doc["entries"]):
        try:
            key, n = (int(e["i"]), int(e["dim"])), int(e["mult"])
        except (KeyError, TypeError, ValueError):
            raise ParseError("entry needs integer i, dim, mult", f"{path}: entries[{k}]", "type") from None
        if n < 0 or key[0] < 0 or key[1] < 0:
            raise ValidationError(f"entries[{k}]: negative value", "negative-entry")
        entries[key] = entries.get(key, 0) + n
    return AbstractNuTable(entries, bool(doc.get("prime_components", False)))


def _nu_analyze(opts: Options, fld: FieldConfig) -> ReportDocument:
    if opts.table is None or opts.p is None:
        raise ValidationError("nu-analyze needs --table FILE and --p N", "missing-argument")
    table = _load_table(opts.table)
    rep = analyze_nu_table(table, opts.p, opts.simplicial)
    doc = ReportDocument(command="nu-analyze", field=fld.label, generators=[])
    doc.verdicts += [
        verdict("nu_dim", rep.dimension), verdict("nu_depth", rep.depth), verdict("nu_cm", rep.cm),
        verdict("nu_serre_max", rep.serre_max), verdict("nu_gcm", rep.gcm),
        verdict("nu_buchsbaum_sufficient", rep.buchsbaum_sufficient),
    ]
    doc.data["entries"] = [{"i": i, "dim": k, "mult": n} for (i, k), n in table.items()]
    doc.notes += list(rep.notes)
    return doc


def _selfcheck(spec: ProblemSpec | None, opts: Options) -> tuple[ReportDocument, bool]:
    if spec is not None:
        box = opts.normality_box if opts.normality_box is not None else spec.normality_box
        cones = {"input": cone_builder(spec.generators, box)}
    else:
        cones = None
    fields = [opts.field] if opts.field is not None else None
    res = selfcheck(cones, fields) if fields else selfcheck(cones)
    doc = ReportDocument(command="selfcheck", field=",".join(f.label for f in fields) if fields else "q,p:2,p:32003",
                         generators=[list(g) for g in spec.generators] if spec else [])
    doc.data["summary"] = [{"suite": k, **v} for k, v in res.summary().items()]
    doc.data["failures"] = [{"suite": c.suite, "target": c.target, "detail": c.detail} for c in res.failures()]
    doc.data["cross_field_differences"] = list(res.cross_field_differences)
    doc.data["passed"] = res.passed
    return doc, res.passed


def run(command: str, spec: ProblemSpec | None, opts: Options | None = None) -> ReportDocument:
    """Execute a command and return its report.  Errors propagate."""
    opts = opts or Options()
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r}", "unknown-command")
    if command == "selfcheck":
        return _selfcheck(spec, opts)[0]
    fld = opts.field or (spec.field if spec else FieldConfig())
    if command == "nu-analyze":
        return _nu_analyze(opts, fld)
    if spec is None:
        raise ValidationError(f"{command} needs --input FILE", "missing-input")
    box = opts.normality_box if opts.normality_box is not None else spec.normality_box
    cone, delta, pair = spec.build(fld, box)
    doc = _base(command, cone, fld)
    _DISPATCH[command](doc, cone, delta, pair, opts, box)
    return doc


# --- argument handling ---------------------------------------------------------------

def _point(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cmlattice",
        description="Homological invariants of squarefree modules over normal semigroup rings.",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", metavar="FILE", help="problem file (YAML, schema 1)")
    ap.add_argument("--format", choices=("json", "text"), default="text")
    ap.add_argument("--field", metavar="q|p:N", help="override the problem's coefficient field")
    ap.add_argument("--normality-box", type=int, metavar="N")
    ap.add_argument("--point", type=_point, metavar="v1,v2,...")
    ap.add_argument("--table", metavar="FILE", help="nu-table file for nu-analyze")
    ap.add_argument("--p", type=int, metavar="N", help="module dimension for nu-analyze")
    ap.add_argument("--simplicial", action="store_true",
                    help="assert that the ambient ring is simplicial and CM (nu-analyze)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = Options(
            field=FieldConfig.parse(args.field) if args.field else None,
            normality_box=args.normality_box,
            point=args.point,
            table=args.table,
            p=args.p,
            simplicial=args.simplicial,
        )
        spec = None
        if args.input:
            try:
                text = Path(args.input).read_text(encoding="utf-8")
            except OSError as e:
                raise ParseError(e.strerror or str(e), args.input, "io") from None
            spec = parse_problem(text)
        elif args.command in NEEDS_INPUT:
            raise ValidationError(f"{args.command} needs --input FILE", "missing-input")
        if args.command == "selfcheck":
            doc, ok = _selfcheck(spec, opts)
        else:
            doc, ok = run(args.command, spec, opts), True
    except InternalInconsistency as e:
        print(f"internal inconsistency [{e.code}]: {e}", file=sys.stderr)
        return 3
    except CmLatticeError as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(doc.to_json() if args.format == "json" else doc.to_text())
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

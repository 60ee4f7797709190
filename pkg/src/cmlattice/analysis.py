"""Homological verdicts for squarefree modules and face rings K[Δ].

Every verdict reduces to cohomology dimensions of the complexes E_F(M): the
multiplicity of R/P_F in the i-th term of the minimal irreducible resolution
is ν_i(P_F, M) = dim H^{d-i-t}(E_F(M)) with t = dim F.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .complexes import (
    AbstractNuTable,
    IdealPair,
    NuTable,
    OrderIdeal,
    SqModule,
    ext_complex,
    ext_modules,
    face_ring,
    pair_module,
    pure_skeleton,
    sheaf_cochain,
    skeleton,
)
from .errors import EmptyDifference, EmptyTable, InternalInconsistency, ValidationError, ZeroModule
from .linalg import cohomology

INF = math.inf


def ext_dims(m: SqModule) -> dict[int, dict[int, int]]:
    """face -> {j: dim H^j(E_F(M))} (nonzero entries only); cached on ``m``."""
    cache = getattr(m, "_ext_dims", None)
    if cache is None:
        cache = {}
        for f in m.cone.faces:
            prof = cohomology(ext_complex(m, f.id), with_basis=False)
            cache[f.id] = {j: h for j, h in prof.as_dict().items() if h}
        m._ext_dims = cache
    return cache


def nu_table(m: SqModule) -> NuTable:
    cone = m.cone
    d = cone.dim
    entries = {}
    for fid, dims in ext_dims(m).items():
        t = cone.face(fid).cone_dim
        for j, h in dims.items():
            i = d - j - t
            if i < 0:
                raise InternalInconsistency(f"negative resolution index at face {fid}")
            entries[(i, fid)] = h
    return NuTable(cone, entries)


def module_dimension(m: SqModule) -> float:
    """Krull dimension; ``-inf`` for the zero module."""
    return max((m.cone.face(f).cone_dim for f in m.support), default=-INF)


def depth(m: SqModule) -> int:
    if m.is_zero():
        raise ZeroModule("depth of the zero module")
    cone = m.cone
    return min(cone.face(f).cone_dim + i for (i, f) in nu_table(m).entries)


def is_cohen_macaulay(m: SqModule) -> bool:
    if m.is_zero():
        return True
    p = module_dimension(m)
    cone = m.cone
    return all(cone.face(f).cone_dim == p - i for (i, f) in nu_table(m).entries)


def is_cm_pair(pair: IdealPair) -> bool:
    if not pair.difference:
        raise EmptyDifference("Δ ∖ Σ is empty")
    m = pair_module(pair)
    target = m.cone.dim - module_dimension(m)
    return all(set(ext_dims(m)[f]) <= {target} for f in pair.delta)


def serre_max(delta: OrderIdeal) -> float:
    """Largest n with (S_n) for K[Δ]; ``inf`` when CM, 1 when (S_2) fails."""
    m = face_ring(delta)
    p = module_dimension(m)
    cone = delta.cone
    bad = [i for (i, f) in nu_table(m).entries if cone.face(f).cone_dim != p - i]
    if not bad:
        return INF
    n = min(bad)
    return n if n >= 2 else 1


def finite_length_profile(m: SqModule) -> dict[int, bool]:
    """i -> whether H^i_m(M) has finite length, i.e. Ext^{d-i} lives at {0} only."""
    cone = m.cone
    d = cone.dim
    dims = ext_dims(m)
    return {
        i: all(not dims[f].get(d - i) for f in dims if f != cone.bottom)
        for i in range(d + 1)
    }


def is_generalized_cm(m: SqModule) -> bool:
    prof = finite_length_profile(m)
    p = module_dimension(m)
    return all(ok for i, ok in prof.items() if i < p)


def is_buchsbaum(m: SqModule) -> bool:
    """For squarefree modules Buchsbaum and generalized CM coincide."""
    return is_generalized_cm(m)


def _gcm_by_nu(m: SqModule) -> bool:
    p = module_dimension(m)
    cone = m.cone
    return all(cone.face(f).cone_dim in (0, p - i) for (i, f) in nu_table(m).entries)


def _ext_route(m: SqModule) -> bool:
    d = m.cone.dim
    for j, n in ext_modules(m).items():
        if n.is_zero():
            continue
        if module_dimension(n) != d - j or not is_cohen_macaulay(n):
            return False
    return True


@dataclass(frozen=True)
class SeqCMVerdict:
    route_ext: bool
    route_duval: bool
    route_filtration: bool

    @property
    def value(self) -> bool:
        return self.route_ext

    def __bool__(self) -> bool:
        return self.value


def filtration_pairs(delta: OrderIdeal) -> list[tuple[int, IdealPair]]:
    """(i, (Δ^[i], (Δ^[i+1])^(i))) for the i where the difference is nonempty."""
    r = delta.dim
    out = []
    for i in range(0, r + 1):
        top = pure_skeleton(delta, i)
        sigma = skeleton(pure_skeleton(delta, i + 1), i) if i + 1 <= r else None
        pair = IdealPair(top, sigma)
        if pair.difference:
            out.append((i, pair))
    return out


def seq_cm(delta: OrderIdeal) -> SeqCMVerdict:
    """Sequential CM-ness of K[Δ] by three independent criteria.

    ext: every Ext^j(K[Δ], ω) is zero or CM of dimension d - j.
    duval: every pure skeleton K[Δ^[i]] is CM.
    filtration: every pair (Δ^[i], (Δ^[i+1])^(i)) is CM.
    """
    r = delta.dim
    route_ext = _ext_route(face_ring(delta))
    route_duval = all(is_cohen_macaulay(face_ring(pure_skeleton(delta, i))) for i in range(0, r + 1))
    route_filtration = all(is_cm_pair(pair) for _, pair in filtration_pairs(delta))
    verdict = SeqCMVerdict(route_ext, route_duval, route_filtration)
    if not route_ext == route_duval == route_filtration:
        raise InternalInconsistency(f"sequential CM routes disagree: {verdict}")
    return verdict


def seq_cm_module(m: SqModule) -> bool:
    return _ext_route(m)


def is_gorenstein_star(delta: OrderIdeal) -> bool:
    r = delta.dim
    if r == -1:
        return True
    cone = delta.cone
    m = face_ring(delta)
    if not is_cohen_macaulay(m):
        verdict = False
    else:
        canonical = ext_modules(m)[cone.dim - (r + 1)]
        verdict = all(canonical.value_dim(f) == 1 for f in delta)
    if r == 0:
        two_points = sum(1 for f in delta if cone.face(f).cone_dim == 1) == 2
        if verdict != two_points:
            raise InternalInconsistency("Gorenstein* for a 0-dimensional complex disagrees with the two-point rule")
    return verdict


def local_cohomology_deg0(m: SqModule) -> list[int]:
    """dim [H^i_m(M)]_0 for i = 0..d, cross-checked against sheaf cohomology of M^+."""
    cone = m.cone
    d = cone.dim
    ext0 = cohomology(ext_complex(m, cone.bottom), with_basis=False)
    lc = [ext0.dim(d - i) for i in range(d + 1)]
    sheaf = cohomology(sheaf_cochain(m), with_basis=False)
    for i in range(2, d + 1):
        if lc[i] != sheaf.dim(i - 1):
            raise InternalInconsistency(
                f"[H^{i}_m(M)]_0 = {lc[i]} but H^{i - 1}(M^+) = {sheaf.dim(i - 1)}"
            )
    if sheaf.dim(0) != m.value_dim(cone.bottom) - lc[0] + lc[1]:
        raise InternalInconsistency("low-degree exact sequence does not balance")
    return lc


@dataclass(frozen=True)
class StrandProfile:
    acyclic: bool
    term_dims: tuple[int, ...]


def linear_strand_profile(m: SqModule) -> dict[int, StrandProfile]:
    cone = m.cone
    d = cone.dim
    table = nu_table(m)
    ext = ext_modules(m)
    out = {}
    for l in range(d + 1):
        terms = [0] * (l + 1)
        for (i, f), n in table.entries.items():
            if i <= l and cone.face(f).cone_dim == l - i:
                terms[i] += n
        n_mod = ext[d - l]
        acyclic = n_mod.is_zero() or (module_dimension(n_mod) == l and is_cohen_macaulay(n_mod))
        out[l] = StrandProfile(acyclic, tuple(terms))
    return out


# --- abstract ν-tables ------------------------------------------------------------

@dataclass(frozen=True)
class NuTableReport:
    dimension: int
    depth: int
    cm: bool
    serre_max: float
    serre_characterized: bool
    gcm: bool
    buchsbaum_sufficient: bool
    notes: tuple[str, ...] = field(default=())


def analyze_nu_table(
    table: AbstractNuTable,
    p: int,
    simplicial_cm: bool,
    equidimensional: bool = False,
) -> NuTableReport:
    """Read depth/CM/S_n/gCM/Buchsbaum off an abstract ν-table.

    The formulas need R Cohen-Macaulay and simplicial; the caller asserts this
    with ``simplicial_cm``.  ``equidimensional`` asserts M = R/I or that all
    minimal primes of M have the same dimension, which (S_n) needs.
    """
    if not simplicial_cm:
        raise ValidationError("ν-table analysis needs a CM simplicial ambient ring", "ambient-not-asserted")
    items = table.items()
    if not items:
        raise EmptyTable("ν-table has no nonzero entries")
    dimension = max((k for (i, k), _ in items if i == 0), default=-1)
    dep = min(k + i for (i, k), _ in items)
    cm = all(p - i <= k <= p for (i, k), _ in items)
    bad = [i for (i, k), _ in items if k < p - i]
    serre = INF if not bad else (min(bad) if min(bad) >= 2 else 1)
    gcm = not any(0 < k < p - i for (i, k), _ in items)
    if table.prime_components:
        bbm = not any(0 < k < p - i for (i, k), _ in items)
    else:
        bbm = not any(k < p - i for (i, k), _ in items)
    notes = ["buchsbaum is a sufficient condition only"]
    if not equidimensional:
        notes.append("serre_max assumes an ideal quotient or equidimensional module")
    if dimension != p:
        notes.append(f"p = {p} differs from the dimension {dimension} read off ν_0")
    return NuTableReport(dimension, dep, cm, serre, equidimensional, gcm, bbm, tuple(notes))


# --- aggregate report -------------------------------------------------------------

@dataclass(frozen=True)
class AnalysisReport:
    dim: float
    depth: int | None
    cm: bool
    serre_max: float | None
    buchsbaum: bool
    gcm: bool
    seqcm: SeqCMVerdict | bool
    gorenstein_star: bool | None
    local_coh0: tuple[int, ...]
    nu: NuTable
    finite_length: dict[int, bool]
    ir_dim: float

    def __post_init__(self):
        if self.depth is not None and self.depth > self.dim:
            raise InternalInconsistency("depth exceeds dimension")
        if self.cm != (self.depth is None or self.depth == self.dim):
            raise InternalInconsistency("CM verdict disagrees with depth = dim")
        if self.cm and not bool(self.seqcm):
            raise InternalInconsistency("CM module reported as not sequentially CM")
        if self.gorenstein_star and not self.cm:
            raise InternalInconsistency("Gorenstein* without CM")


def analyze_module(m: SqModule, delta: OrderIdeal | None = None) -> AnalysisReport:
    """Full report; pass ``delta`` when ``m`` is K[Δ] to get the Δ-only verdicts."""
    table = nu_table(m)
    gcm = is_generalized_cm(m)
    if gcm != _gcm_by_nu(m):
        raise InternalInconsistency("finite-length profile and ν-table disagree on gCM")
    if delta is not None:
        seq: SeqCMVerdict | bool = seq_cm(delta)
        serre = serre_max(delta)
        gstar = is_gorenstein_star(delta)
    else:
        seq, serre, gstar = seq_cm_module(m), None, None
    return AnalysisReport(
        dim=module_dimension(m),
        depth=None if m.is_zero() else depth(m),
        cm=is_cohen_macaulay(m),
        serre_max=serre,
        buchsbaum=gcm,
        gcm=gcm,
        seqcm=seq,
        gorenstein_star=gstar,
        local_coh0=tuple(local_cohomology_deg0(m)),
        nu=table,
        finite_length=finite_length_profile(m),
        ir_dim=table.ir_dim,
    )


def analyze(delta: OrderIdeal) -> AnalysisReport:
    return analyze_module(face_ring(delta), delta)

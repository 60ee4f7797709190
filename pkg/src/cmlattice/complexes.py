"""Order ideals of the face lattice, squarefree modules and their complexes.

A squarefree module is stored as one vector space per face (its value at the
interior point c(F)) together with the structure maps along cover relations.
Everything homological is then a finite complex of vector spaces:

* ``ext_complex(M, F)`` is the degree-c(F) strand of RHom(M, omega_R); its
  cohomology in index j is [Ext^j(M, omega_R)]_{c(F)}.
* ``sheaf_cochain(M)`` is the cellular cochain complex of the sheaf M^+ on
  the cross-section polytope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .cone import SemigroupCone, lattice_membership
from .errors import (
    ExponentOutsideCone,
    IndexOutOfRange,
    InvalidPair,
    NonCommutingDiamond,
    NotAnOrderIdeal,
    NotRadicalDetected,
    ValidationError,
)
from .linalg import (
    ChainMap,
    CochainComplex,
    CohomologyProfile,
    ExactMatrix,
    cohomology,
    induced_map_on_cohomology,
    kernel_basis,
)


# --- order ideals ---------------------------------------------------------------

@dataclass(frozen=True)
class OrderIdeal:
    cone: SemigroupCone = field(repr=False, compare=False)
    faces: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "faces", frozenset(self.faces))
        if self.cone.bottom not in self.faces:
            raise NotAnOrderIdeal("an order ideal must contain the face {0}")
        for f in self.faces:
            if not 0 <= f < len(self.cone.faces):
                raise NotAnOrderIdeal(f"unknown face id {f}")
            for g in self.cone.lower_covers(f):
                if g not in self.faces:
                    raise NotAnOrderIdeal(f"face {g} lies below {f} but is missing")

    def __contains__(self, fid: int) -> bool:
        return fid in self.faces

    def __iter__(self):
        return iter(sorted(self.faces))

    def __len__(self) -> int:
        return len(self.faces)

    @property
    def dim(self) -> int:
        """dim |Δ| (cell dimension; -1 for Δ = {{0}})."""
        return max(self.cone.face(f).cell_dim for f in self.faces)

    def facets(self) -> list[int]:
        """Maximal faces."""
        return [f for f in self if not any(g in self.faces for g in self.cone.upper_covers(f))]

    def generator_sets(self) -> list[list[int]]:
        return [sorted(self.cone.face(f).generator_set) for f in self.facets()]


def _down_closure(cone: SemigroupCone, seeds: Iterable[int]) -> set[int]:
    out = {cone.bottom}
    stack = list(seeds)
    while stack:
        f = stack.pop()
        if f in out:
            continue
        out.add(f)
        stack.extend(cone.lower_covers(f))
    return out


def order_ideal_from_seeds(cone: SemigroupCone, seeds: Iterable[int]) -> OrderIdeal:
    seeds = list(seeds)
    for s in seeds:
        if not 0 <= s < len(cone.faces):
            raise NotAnOrderIdeal(f"unknown face id {s}")
    return OrderIdeal(cone, frozenset(_down_closure(cone, seeds)))


def order_ideal_from_generator_sets(cone: SemigroupCone, sets: Iterable[Iterable[int]]) -> OrderIdeal:
    """Seeds given by generator indices, each saturated to the face it spans."""
    return order_ideal_from_seeds(cone, [cone.face_by_generators(s) for s in sets])


def full_ideal(cone: SemigroupCone) -> OrderIdeal:
    return OrderIdeal(cone, frozenset(f.id for f in cone.faces))


def order_ideal_from_ideal_generators(cone: SemigroupCone, exponents: Sequence[Sequence[int]]) -> OrderIdeal:
    """Δ of the monomial ideal generated by x^b for b in ``exponents``.

    The ideal is only probed at the points c(F) and 2c(F); a disagreement
    proves it is not radical.
    """
    exps = [tuple(int(x) for x in b) for b in exponents]
    for b in exps:
        if len(b) != cone.dim or not lattice_membership(cone, b):
            raise ExponentOutsideCone(f"exponent {b} is not in the cone")

    def in_ideal(a):
        return any(lattice_membership(cone, [x - y for x, y in zip(a, b)]) for b in exps)

    members = set()
    for f in cone.faces:
        c = f.interior_point
        once, twice = in_ideal(c), in_ideal([2 * x for x in c])
        if once != twice:
            raise NotRadicalDetected(
                f"x^c(F) and x^2c(F) disagree on membership for face {sorted(f.generator_set)}"
            )
        if not once:
            members.add(f.id)
    if not members:
        raise ValidationError("the ideal is the unit ideal", "unit-ideal")
    if _down_closure(cone, members) != members:
        raise NotAnOrderIdeal("membership pattern is not downward closed")
    return OrderIdeal(cone, frozenset(members))


def delta_value(delta: OrderIdeal, fid: int) -> int:
    """δ(F): largest cell dimension of a face of Δ containing F."""
    cone = delta.cone
    return max(cone.face(g).cell_dim for g in cone.faces_containing(fid) if g in delta)


def skeleton(delta: OrderIdeal, i: int) -> OrderIdeal:
    if not -1 <= i <= delta.dim:
        raise IndexOutOfRange(f"skeleton index {i} outside [-1, {delta.dim}]")
    cone = delta.cone
    return OrderIdeal(cone, frozenset(f for f in delta.faces if cone.face(f).cell_dim <= i))


def pure_skeleton(delta: OrderIdeal, i: int) -> OrderIdeal:
    if not -1 <= i <= delta.dim:
        raise IndexOutOfRange(f"pure skeleton index {i} outside [-1, {delta.dim}]")
    cone = delta.cone
    return OrderIdeal(cone, frozenset(
        f for f in delta.faces if cone.face(f).cell_dim <= i and delta_value(delta, f) >= i
    ))


@dataclass(frozen=True)
class IdealPair:
    """(Δ, Σ) with Σ ⊆ Δ; ``sigma=None`` is the empty order ideal."""

    delta: OrderIdeal
    sigma: OrderIdeal | None = None

    def __post_init__(self):
        if self.sigma is None:
            return
        if not self.sigma.faces <= self.delta.faces:
            raise InvalidPair("sigma is not contained in delta", "sigma-not-contained")
        if self.sigma.faces == {self.delta.cone.bottom}:
            raise InvalidPair("sigma = {{0}} is excluded; use the empty sigma", "sigma-is-origin")

    @property
    def difference(self) -> frozenset[int]:
        if self.sigma is None:
            return self.delta.faces
        return self.delta.faces - self.sigma.faces


# --- squarefree modules -----------------------------------------------------------

class SqModule:
    """Squarefree module: ``values[F]`` = dim M_{c(F)}, ``maps[(F, G)]`` the
    structure map M_{c(F)} -> M_{c(G)} for each cover F ⋖ G."""

    def __init__(
        self,
        cone: SemigroupCone,
        values: Mapping[int, int],
        maps: Mapping[tuple[int, int], ExactMatrix] | None = None,
        validate: bool = True,
    ):
        self.cone = cone
        self.field = cone.field
        self.values = {f.id: int(values.get(f.id, 0)) for f in cone.faces}
        maps = dict(maps or {})
        self.maps: dict[tuple[int, int], ExactMatrix] = {}
        for lo, hi, _ in cone.covers:
            m = maps.pop((lo, hi), None)
            if m is None:
                m = ExactMatrix.zeros(self.field, self.values[hi], self.values[lo])
            elif m.shape != (self.values[hi], self.values[lo]):
                raise ValidationError(
                    f"map {lo}->{hi} has shape {m.shape}, expected "
                    f"{(self.values[hi], self.values[lo])}", "bad-shape")
            self.maps[(lo, hi)] = m
        if maps:
            raise ValidationError(f"maps given for non-covers {sorted(maps)}", "not-a-cover")
        if validate:
            self.validate()

    def validate(self) -> None:
        for h, (g1, g2), f in self.cone.diamonds():
            a = self.maps[(g1, f)] @ self.maps[(h, g1)]
            b = self.maps[(g2, f)] @ self.maps[(h, g2)]
            if a != b:
                raise NonCommutingDiamond(f"structure maps do not commute on {h} < {g1},{g2} < {f}")

    def value_dim(self, fid: int) -> int:
        return self.values[fid]

    def phi(self, upper: int, lower: int) -> ExactMatrix:
        return self.maps[(lower, upper)]

    @property
    def support(self) -> list[int]:
        return [f for f, v in sorted(self.values.items()) if v]

    def is_zero(self) -> bool:
        return not any(self.values.values())

    def __repr__(self):
        vals = {f: v for f, v in self.values.items() if v}
        return f"SqModule(values={vals})"


def pair_module(pair: IdealPair) -> SqModule:
    """I_Σ / I_Δ: a copy of K on each face of Δ ∖ Σ, identity maps between them."""
    delta = pair.delta
    cone = delta.cone
    diff = pair.difference
    fld = cone.field
    values = {f: 1 for f in diff}
    one = ExactMatrix.identity(fld, 1)
    maps = {(lo, hi): one for lo, hi, _ in cone.covers if lo in diff and hi in diff}
    return SqModule(cone, values, maps, validate=False)


def face_ring(delta: OrderIdeal) -> SqModule:
    """K[Δ] = R / I_Δ."""
    return pair_module(IdealPair(delta))


def canonical_module_of_ring(cone: SemigroupCone) -> SqModule:
    """omega_R: K on the top face only."""
    return SqModule(cone, {cone.top: 1}, validate=False)


def zero_module(cone: SemigroupCone) -> SqModule:
    return SqModule(cone, {}, validate=False)


# --- complexes --------------------------------------------------------------------

@dataclass(frozen=True)
class _Layout:
    """A complex together with the face blocks that make up each term."""

    complex: CochainComplex
    blocks: Mapping[int, tuple[tuple[int, int, int], ...]]  # index -> (face, offset, size)

    def block_dict(self, i: int) -> dict[int, tuple[int, int]]:
        return {f: (off, n) for f, off, n in self.blocks.get(i, ())}


def _assemble(fld, index_faces: dict[int, list[int]], sizes: Mapping[int, int], block_map) -> _Layout:
    """Build a complex whose i-th term is the sum of the blocks of ``index_faces[i]``.

    ``block_map(src_face, tgt_face)`` returns the block of d from src to tgt
    or None.  Zero terms at both ends are trimmed.
    """
    live = [i for i in sorted(index_faces) if sum(sizes[f] for f in index_faces[i])]
    if not live:
        return _Layout(CochainComplex.zero(fld), {})
    lo, hi = live[0], live[-1]
    blocks, dims = {}, []
    for i in range(lo, hi + 1):
        off, row = 0, []
        for f in index_faces.get(i, []):
            row.append((f, off, sizes[f]))
            off += sizes[f]
        blocks[i] = tuple(row)
        dims.append(off)
    diffs = []
    for i in range(lo, hi):
        table = [[fld.zero] * dims[i - lo] for _ in range(dims[i + 1 - lo])]
        for g, goff, gn in blocks[i]:
            if not gn:
                continue
            for h, hoff, hn in blocks[i + 1]:
                if not hn:
                    continue
                b = block_map(g, h)
                if b is None:
                    continue
                for r in range(hn):
                    for c in range(gn):
                        table[hoff + r][goff + c] = b.entries[r][c]
        diffs.append(ExactMatrix(fld, dims[i + 1 - lo], dims[i - lo], tuple(tuple(r) for r in table)))
    return _Layout(CochainComplex(fld, lo, tuple(dims), tuple(diffs)), blocks)


def _ext_layout(m: SqModule, fid: int) -> _Layout:
    cone = m.cone
    d = cone.dim
    index_faces: dict[int, list[int]] = {}
    for g in cone.faces_containing(fid):
        index_faces.setdefault(d - cone.face(g).cone_dim, []).append(g)

    def block(g, h):
        sign = cone.signs.get((h, g))
        if sign is None:
            return None
        return m.phi(g, h).T.scale(sign)

    return _assemble(m.field, index_faces, m.values, block)


def ext_complex(m: SqModule, fid: int) -> CochainComplex:
    """E_F(M): term i is the sum of M_{c(G)}^* over G ⊇ F with dim G = d - i."""
    return _ext_layout(m, fid).complex


def _sheaf_layout(m: SqModule) -> _Layout:
    cone = m.cone
    index_faces: dict[int, list[int]] = {}
    for f in cone.faces:
        if f.cone_dim >= 1:
            index_faces.setdefault(f.cell_dim, []).append(f.id)
    index_faces.setdefault(0, [])

    def block(g, h):
        sign = cone.signs.get((g, h))
        if sign is None:
            return None
        return m.phi(h, g).scale(sign)

    return _assemble(m.field, index_faces, m.values, block)


def sheaf_cochain(m: SqModule) -> CochainComplex:
    """Cellular cochains of M^+: term i is the sum of M_{c(F)} over cells of dim i."""
    return _sheaf_layout(m).complex


def _projection(src: _Layout, tgt: _Layout, i: int, fld) -> ExactMatrix:
    """Coordinate projection of term i of ``src`` onto the blocks present in ``tgt``."""
    s_dim, t_dim = src.complex.dim(i), tgt.complex.dim(i)
    table = [[fld.zero] * s_dim for _ in range(t_dim)]
    sb = src.block_dict(i)
    for f, (toff, n) in tgt.block_dict(i).items():
        soff, _ = sb[f]
        for k in range(n):
            table[toff + k][soff + k] = fld.one
    return ExactMatrix(fld, t_dim, s_dim, tuple(tuple(r) for r in table))


def ext_modules(m: SqModule, validate: bool = True) -> dict[int, SqModule]:
    """Ext^j_R(M, omega_R) for j = 0..d as squarefree modules.

    For F ⋖ F' the summands of E_F(M) indexed by G ⊉ F' span a subcomplex
    whose quotient is E_{F'}(M); the structure map is the induced map of that
    quotient on cohomology.
    """
    cone = m.cone
    fld = m.field
    d = cone.dim
    layouts = {f.id: _ext_layout(m, f.id) for f in cone.faces}
    profiles: dict[int, CohomologyProfile] = {f: cohomology(l.complex) for f, l in layouts.items()}
    values = {j: {f: profiles[f].dim(j) for f in layouts} for j in range(d + 1)}
    maps: dict[int, dict] = {j: {} for j in range(d + 1)}
    for lo, hi, _ in cone.covers:
        src, tgt = layouts[lo], layouts[hi]
        needed = [j for j in range(d + 1) if values[j][lo] and values[j][hi]]
        if not needed:
            continue
        idx = set(src.complex.indices()) | set(tgt.complex.indices())
        chain = ChainMap(src.complex, tgt.complex, {i: _projection(src, tgt, i, fld) for i in idx})
        if validate:
            chain.validate()
        for j in needed:
            maps[j][(lo, hi)] = induced_map_on_cohomology(
                chain, j, profiles[lo], profiles[hi], validate=False)
    return {j: SqModule(cone, values[j], maps[j], validate=validate) for j in range(d + 1)}


def regularize(m: SqModule) -> SqModule:
    """Replace M_0 by the global sections of M^+, keeping M on all other faces."""
    cone = m.cone
    fld = m.field
    lay = _sheaf_layout(m)
    c = lay.complex
    blocks = lay.block_dict(0)
    if c.dim(0) == 0:
        gamma = ExactMatrix.zeros(fld, 0, 0)
    else:
        gamma = kernel_basis(c.d(0))
    values = dict(m.values)
    values[cone.bottom] = gamma.cols
    maps = {k: v for k, v in m.maps.items() if k[0] != cone.bottom}
    for ray in cone.upper_covers(cone.bottom):
        n = m.values[ray]
        if ray in blocks and n and gamma.cols:
            off, _ = blocks[ray]
            rows = [list(gamma.entries[off + k]) for k in range(n)]
            maps[(cone.bottom, ray)] = ExactMatrix.from_rows(fld, rows, gamma.cols)
    return SqModule(cone, values, maps)


# --- ν-tables ---------------------------------------------------------------------

@dataclass(frozen=True)
class NuTable:
    """ν_i(P_F, M), keyed by (i, face id); only nonzero entries are stored."""

    cone: SemigroupCone = field(repr=False, compare=False)
    entries: Mapping[tuple[int, int], int]

    def get(self, i: int, fid: int) -> int:
        return self.entries.get((i, fid), 0)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def items(self):
        return sorted(self.entries.items())

    def abstract(self) -> "AbstractNuTable":
        out: dict[tuple[int, int], int] = {}
        for (i, f), n in self.entries.items():
            key = (i, self.cone.face(f).cone_dim)
            out[key] = out.get(key, 0) + n
        return AbstractNuTable(out, prime_components=True)

    @property
    def ir_dim(self) -> float:
        return max((i for i, _ in self.entries), default=-math.inf)


@dataclass(frozen=True)
class AbstractNuTable:
    """ν_i(W, M) known only through (i, dim R/W).

    ``prime_components`` marks tables where every W is a monomial prime, so a
    dim-0 entry is W = m itself.
    """

    entries: Mapping[tuple[int, int], int]
    prime_components: bool = False

    def items(self):
        return sorted((k, v) for k, v in self.entries.items() if v)

"""Pointed rational cones from semigroup generators and their face lattices.

Facet normals are found by brute force over (d-1)-subsets of generators and
faces by closing the facets' generator sets under intersection.  Indices of
generators and facet normals are 0-based throughout.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import (
    DegenerateInput,
    LatticeNotFull,
    NotACover,
    NotNormal,
    NotPointed,
    OutsideCone,
)
from .linalg import QQ, ExactMatrix, FieldConfig, determinant, kernel_basis, rank, solve_in_columns

Vector = tuple[int, ...]


class NormalityNotVerified(UserWarning):
    """Normality of K[C] is assumed but was not checked on any box."""


def _dot(h: Sequence[int], a: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(h, a))


def _primitive(v: Sequence[Fraction]) -> Vector:
    den = math.lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    return tuple(x // g for x in ints)


@dataclass(frozen=True)
class Face:
    id: int
    facet_zero_set: frozenset[int]
    generator_set: frozenset[int]
    cone_dim: int
    interior_point: Vector
    basis: tuple[int, ...] = field(repr=False)

    @property
    def cell_dim(self) -> int:
        """Dimension of the cell |F| in the cross-section polytope."""
        return self.cone_dim - 1


@dataclass(frozen=True)
class NormalityVerdict:
    consistent: bool
    counterexample: Vector | None = None


@dataclass(frozen=True)
class SemigroupCone:
    field: FieldConfig
    dim: int
    generators: tuple[Vector, ...]
    facet_normals: tuple[Vector, ...]
    faces: tuple[Face, ...]
    signs: Mapping[tuple[int, int], int] = field(repr=False)

    def __post_init__(self):
        by_zero = {f.facet_zero_set: f.id for f in self.faces}
        by_gens = {f.generator_set: f.id for f in self.faces}
        up: dict[int, list[int]] = {f.id: [] for f in self.faces}
        down: dict[int, list[int]] = {f.id: [] for f in self.faces}
        for lo, hi in sorted(self.signs):
            up[lo].append(hi)
            down[hi].append(lo)
        above = {
            f.id: tuple(g.id for g in self.faces if f.generator_set <= g.generator_set)
            for f in self.faces
        }
        object.__setattr__(self, "_by_zero", by_zero)
        object.__setattr__(self, "_by_gens", by_gens)
        object.__setattr__(self, "_up", {k: tuple(v) for k, v in up.items()})
        object.__setattr__(self, "_down", {k: tuple(v) for k, v in down.items()})
        object.__setattr__(self, "_above", above)

    # --- lattice navigation ---------------------------------------------------

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return len(self.faces) - 1

    @property
    def covers(self) -> list[tuple[int, int, int]]:
        return [(lo, hi, s) for (lo, hi), s in sorted(self.signs.items())]

    def face(self, fid: int) -> Face:
        return self.faces[fid]

    def upper_covers(self, fid: int) -> tuple[int, ...]:
        return self._up[fid]

    def lower_covers(self, fid: int) -> tuple[int, ...]:
        return self._down[fid]

    def faces_containing(self, fid: int) -> tuple[int, ...]:
        """All G with G ⊇ F, in face-id order."""
        return self._above[fid]

    def contains(self, big: int, small: int) -> bool:
        return self.faces[small].generator_set <= self.faces[big].generator_set

    def faces_of_dim(self, k: int) -> list[int]:
        return [f.id for f in self.faces if f.cone_dim == k]

    @property
    def rays(self) -> list[int]:
        return self.faces_of_dim(1)

    def face_by_zero_set(self, zero_set) -> int:
        return self._by_zero[frozenset(zero_set)]

    def face_by_generators(self, indices) -> int:
        """Smallest face containing the given generators (saturation)."""
        idx = frozenset(indices)
        for i in idx:
            if not 0 <= i < len(self.generators):
                raise DegenerateInput(f"generator index {i} out of range")
        zs = frozenset(
            k for k, h in enumerate(self.facet_normals)
            if all(_dot(h, self.generators[i]) == 0 for i in idx)
        )
        return self._by_zero[zs]

    def diamonds(self):
        """Yield (H, (G1, G2), F) for every length-2 interval H < F."""
        for f in self.faces:
            below2 = {}
            for g in self._down[f.id]:
                for h in self._down[g]:
                    below2.setdefault(h, []).append(g)
            for h, mids in sorted(below2.items()):
                yield h, tuple(mids), f.id

    def with_signs(self, signs: Mapping[tuple[int, int], int]) -> "SemigroupCone":
        return replace(self, signs=dict(signs))

    def h(self, a: Sequence[int]) -> list[int]:
        return [_dot(n, a) for n in self.facet_normals]


# --- construction -------------------------------------------------------------

def _check_lattice(gens: list[Vector], d: int) -> None:
    if rank(ExactMatrix.from_rows(QQ, gens)) < d:
        raise LatticeNotFull("generators do not span a full-rank lattice")
    g = 0
    for rows in itertools.combinations(gens, d):
        g = math.gcd(g, int(determinant(ExactMatrix.from_rows(QQ, rows))))
        if g == 1:
            return
    raise LatticeNotFull(f"maximal minors of the generator matrix have gcd {g}, not 1")


def _facet_normals(gens: list[Vector], d: int) -> list[Vector]:
    found: set[Vector] = set()
    seen_spans: set[frozenset[int]] = set()
    for subset in itertools.combinations(range(len(gens)), d - 1):
        if d == 1:
            ker_cols = [[Fraction(1)]]
        else:
            m = ExactMatrix.from_rows(QQ, [gens[i] for i in subset])
            if rank(m) != d - 1:
                continue
            ker_cols = kernel_basis(m).columns()
        h = _primitive(ker_cols[0])
        zero = frozenset(i for i, g in enumerate(gens) if _dot(h, g) == 0)
        if zero in seen_spans:
            continue
        seen_spans.add(zero)
        vals = [_dot(h, g) for g in gens]
        if all(v >= 0 for v in vals):
            found.add(h)
        elif all(v <= 0 for v in vals):
            found.add(tuple(-x for x in h))
    return sorted(found, reverse=True)


def _ordered_basis(gens: list[Vector], members: Sequence[int]) -> tuple[int, ...]:
    chosen: list[int] = []
    for i in sorted(members):
        trial = chosen + [i]
        if rank(ExactMatrix.from_rows(QQ, [gens[j] for j in trial])) == len(trial):
            chosen = trial
    return tuple(chosen)


def _incidence(gens: list[Vector], upper: Face, lower: Face) -> int:
    """Sign of det of (basis(lower), v) written in basis(upper)."""
    k = upper.cone_dim
    v = min(upper.generator_set - lower.generator_set)
    frame = ExactMatrix.from_columns(QQ, [gens[i] for i in upper.basis], len(gens[0]))
    coords = [solve_in_columns(frame, gens[i]) for i in lower.basis]
    coords.append(solve_in_columns(frame, gens[v]))
    det = determinant(ExactMatrix.from_columns(QQ, coords, k))
    if det == 0:
        raise AssertionError("degenerate incidence frame")
    return 1 if det > 0 else -1


def build_cone(
    generators: Sequence[Sequence[int]],
    field: FieldConfig = QQ,
    normality_box: int | None = None,
) -> SemigroupCone:
    """Build the cone spanned by ``generators`` together with its face lattice.

    Raises DegenerateInput, LatticeNotFull or NotPointed on bad input.  When
    ``normality_box`` is given the bounded normality check runs and a failure
    raises NotNormal; otherwise a NormalityNotVerified warning is emitted.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        raise DegenerateInput("no generators")
    d = len(gens[0])
    if d == 0 or any(len(g) != d for g in gens):
        raise DegenerateInput("generators must share a positive dimension")
    if any(not any(g) for g in gens):
        raise DegenerateInput("the zero vector is not allowed as a generator")
    _check_lattice(gens, d)

    normals = _facet_normals(gens, d)
    if not normals or rank(ExactMatrix.from_rows(QQ, normals)) < d:
        raise NotPointed("the cone contains a line")

    # meet-closure of facet generator sets
    facet_sets = {frozenset(i for i, g in enumerate(gens) if _dot(h, g) == 0) for h in normals}
    closed = set(facet_sets)
    frontier = set(facet_sets)
    while frontier:
        new = set()
        for a in frontier:
            for b in facet_sets:
                c = a & b
                if c not in closed:
                    new.add(c)
        closed |= new
        frontier = new
    closed.add(frozenset(range(len(gens))))

    raw = []
    for s in closed:
        basis = _ordered_basis(gens, s)
        raw.append((len(basis), tuple(sorted(s)), s, basis))
    raw.sort(key=lambda t: (t[0], t[1]))
    faces = []
    for fid, (k, _, s, basis) in enumerate(raw):
        zs = frozenset(j for j, h in enumerate(normals) if all(_dot(h, gens[i]) == 0 for i in s))
        point = tuple(sum(gens[i][c] for i in s) for c in range(d))
        faces.append(Face(fid, zs, s, k, point, basis))

    signs = {}
    for hi in faces:
        for lo in faces:
            if lo.cone_dim == hi.cone_dim - 1 and lo.generator_set < hi.generator_set:
                signs[(lo.id, hi.id)] = _incidence(gens, hi, lo)

    cone = SemigroupCone(field, d, tuple(gens), tuple(normals), tuple(faces), signs)
    if normality_box is not None:
        verdict = verify_normality_bounded(cone, normality_box)
        if not verdict.consistent:
            raise NotNormal(f"lattice point {verdict.counterexample} is not in the semigroup")
    else:
        warnings.warn(
            "normality of the semigroup ring is assumed, not verified",
            NormalityNotVerified,
            stacklevel=2,
        )
    return cone


# --- point queries ------------------------------------------------------------

def face_of_point(cone: SemigroupCone, a: Sequence[int]) -> int:
    vals = cone.h(a)
    if any(v < 0 for v in vals):
        raise OutsideCone(f"{tuple(a)} is not in the cone")
    return cone.face_by_zero_set(i for i, v in enumerate(vals) if v == 0)


def is_simplicial(cone: SemigroupCone) -> bool:
    return len(cone.rays) == cone.dim


def lattice_membership(cone: SemigroupCone, a: Sequence[int]) -> bool:
    return all(v >= 0 for v in cone.h(a))


def supp_plus(cone: SemigroupCone, a: Sequence[int]) -> frozenset[int]:
    return frozenset(i for i, v in enumerate(cone.h(a)) if v > 0)


def psi_membership(cone: SemigroupCone, a: Sequence[int]) -> bool:
    """Is some nonzero c in C with supp+(c) ⊆ supp+(-a)?

    supp+ is additive on C (all h_i are >= 0 there), so a sum of generators
    has the union of their supports and a single generator is the best
    witness.
    """
    target = supp_plus(cone, [-x for x in a])
    return any(supp_plus(cone, g) <= target for g in cone.generators)


def incidence_sign(cone: SemigroupCone, lower: int, upper: int) -> int:
    try:
        return cone.signs[(lower, upper)]
    except KeyError:
        raise NotACover(f"face {lower} is not covered by face {upper}") from None


def verify_normality_bounded(cone: SemigroupCone, box_bound: int) -> NormalityVerdict:
    """Check every lattice point of the cone in [-N, N]^d is a sum of generators."""
    gens = cone.generators
    weight = [sum(col) for col in zip(*cone.facet_normals)]  # positive on P \ {0}

    @lru_cache(maxsize=None)
    def reachable(a: Vector) -> bool:
        if not any(a):
            return True
        for g in gens:
            b = tuple(x - y for x, y in zip(a, g))
            if lattice_membership(cone, b) and _dot(weight, b) < _dot(weight, a) and reachable(b):
                return True
        return False

    rng = range(-box_bound, box_bound + 1)
    for a in itertools.product(rng, repeat=cone.dim):
        if lattice_membership(cone, a) and not reachable(a):
            return NormalityVerdict(False, a)
    return NormalityVerdict(True)

"""Exact linear algebra over Q or a prime field, and cochain-complex cohomology.

Matrices are small and dense.  Over Q the forward pass is fraction-free
(Bareiss) on integer-scaled rows; over F_p it is ordinary Gauss-Jordan.
Nothing in this module touches floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import MalformedComplex, NotAChainMap, ValidationError


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for q in range(3, math.isqrt(n) + 1, 2):
        if n % q == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldConfig:
    """Base field: ``FieldConfig()`` is Q, ``FieldConfig("prime", 2)`` is F_2."""

    kind: str = "rationals"
    p: int | None = None

    def __post_init__(self):
        if self.kind == "rationals":
            if self.p is not None:
                raise ValidationError("rationals take no modulus", "bad-field")
        elif self.kind == "prime":
            if self.p is None or not _is_prime(self.p):
                raise ValidationError(f"{self.p!r} is not prime", "bad-field")
        else:
            raise ValidationError(f"unknown field kind {self.kind!r}", "bad-field")

    @classmethod
    def parse(cls, text: str) -> "FieldConfig":
        """Accepts ``q``/``rationals`` or ``p:N``."""
        t = str(text).strip().lower()
        if t in ("q", "qq", "rationals"):
            return cls()
        if t.startswith("p:"):
            try:
                p = int(t[2:])
            except ValueError:
                raise ValidationError(f"bad prime in field spec {text!r}", "bad-field") from None
            return cls("prime", p)
        raise ValidationError(f"unknown field spec {text!r}", "bad-field")

    @property
    def label(self) -> str:
        return "q" if self.kind == "rationals" else f"p:{self.p}"

    @property
    def is_rational(self) -> bool:
        return self.kind == "rationals"

    def element(self, x):
        if self.kind == "rationals":
            return x if isinstance(x, Fraction) else Fraction(x)
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    @property
    def zero(self):
        return self.element(0)

    @property
    def one(self):
        return self.element(1)

    def inv(self, x):
        if self.kind == "rationals":
            return 1 / x
        return pow(x, -1, self.p)

    def mul(self, a, b):
        return a * b if self.p is None else a * b % self.p

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p


QQ = FieldConfig()


@dataclass(frozen=True, eq=True)
class ExactMatrix:
    field: FieldConfig
    rows: int
    cols: int
    entries: tuple = field(repr=False)

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValidationError(
                f"entry table does not match shape {self.rows}x{self.cols}", "bad-shape"
            )

    @classmethod
    def from_rows(cls, fld: FieldConfig, rows: Sequence[Sequence], cols: int | None = None):
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValidationError("column count needed for an empty matrix", "bad-shape")
            cols = len(rows[0])
        entries = tuple(tuple(fld.element(x) for x in r) for r in rows)
        return cls(fld, len(rows), cols, entries)

    @classmethod
    def from_columns(cls, fld: FieldConfig, columns: Sequence[Sequence], rows: int):
        columns = list(columns)
        table = [[columns[j][i] for j in range(len(columns))] for i in range(rows)]
        return cls.from_rows(fld, table, len(columns))

    @classmethod
    def zeros(cls, fld: FieldConfig, rows: int, cols: int):
        z = fld.zero
        return cls(fld, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, fld: FieldConfig, n: int):
        z, o = fld.zero, fld.one
        return cls(fld, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(
            self.field, self.cols, self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def column(self, j: int) -> list:
        return [self.entries[i][j] for i in range(self.rows)]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def _check(self, other: "ExactMatrix"):
        if self.field != other.field:
            raise ValidationError("matrices over different fields", "field-mismatch")

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValidationError(f"cannot multiply {self.shape} by {other.shape}", "bad-shape")
        p = self.field.p
        ot = other.T.entries
        out = []
        for r in self.entries:
            row = []
            for c in ot:
                s = sum(a * b for a, b in zip(r, c) if a and b)
                row.append(s % p if p else Fraction(s))
            out.append(tuple(row))
        return ExactMatrix(self.field, self.rows, other.cols, tuple(out))

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise ValidationError("shape mismatch in sum", "bad-shape")
        f = self.field
        return ExactMatrix(f, self.rows, self.cols, tuple(
            tuple(f.add(a, b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> "ExactMatrix":
        return self.scale(-1)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def scale(self, c) -> "ExactMatrix":
        f = self.field
        c = f.element(c)
        return ExactMatrix(f, self.rows, self.cols,
                           tuple(tuple(f.mul(c, a) for a in r) for r in self.entries))

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.rows != other.rows:
            raise ValidationError("row mismatch in hstack", "bad-shape")
        return ExactMatrix(self.field, self.rows, self.cols + other.cols,
                           tuple(a + b for a, b in zip(self.entries, other.entries)))

    def select_columns(self, idx: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix(self.field, self.rows, len(idx),
                           tuple(tuple(r[j] for j in idx) for r in self.entries))

    def tolist(self) -> list[list]:
        return [list(r) for r in self.entries]


# --- elimination kernels ----------------------------------------------------

def _bareiss_echelon(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free forward elimination on an integer matrix (modified in place)."""
    nrows = len(rows)
    pivots: list[int] = []
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        a = pr[c]
        for i in range(r + 1, nrows):
            row = rows[i]
            b = row[c]
            for j in range(c + 1, ncols):
                row[j] = (a * row[j] - b * pr[j]) // prev
            row[c] = 0
        # Sylvester's identity makes the division above exact, also for the
        # rows that were already zero in column c.
        prev = a
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _integer_rows(entries: Iterable[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for r in entries:
        den = math.lcm(*(x.denominator for x in r)) if r else 1
        out.append([int(x * den) for x in r])
    return out


def _rref_rational(entries, ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    ech, pivots = _bareiss_echelon(_integer_rows(entries), ncols)
    rref = [[Fraction(x) for x in r] for r in ech]
    for k in range(len(pivots) - 1, -1, -1):
        c = pivots[k]
        row = rref[k]
        inv = 1 / row[c]
        rref[k] = row = [x * inv for x in row]
        for i in range(k):
            f = rref[i][c]
            if f:
                rref[i] = [x - f * y for x, y in zip(rref[i], row)]
    return rref, pivots


def _rref_modp(entries, ncols: int, p: int) -> tuple[list[list[int]], list[int]]:
    m = [list(r) for r in entries]
    nrows = len(m)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        pr = m[r]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], pr)]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rref(m: ExactMatrix) -> tuple[list[list], list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    if m.rows == 0 or m.cols == 0:
        return [], []
    if m.field.is_rational:
        return _rref_rational(m.entries, m.cols)
    return _rref_modp(m.entries, m.cols, m.field.p)


def rank(m: ExactMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.field.is_rational:
        return len(_bareiss_echelon(_integer_rows(m.entries), m.cols)[1])
    return len(_rref_modp(m.entries, m.cols, m.field.p)[1])


def pivot_columns(m: ExactMatrix) -> list[int]:
    """Indices of the greedy left-to-right maximal independent set of columns."""
    if m.field.is_rational and m.rows and m.cols:
        return _bareiss_echelon(_integer_rows(m.entries), m.cols)[1]
    return rref(m)[1]


def kernel_basis(m: ExactMatrix) -> ExactMatrix:
    """Columns spanning ker m; one column per free variable of the RREF."""
    f = m.field
    red, pivots = rref(m)
    pivset = set(pivots)
    free = [j for j in range(m.cols) if j not in pivset]
    cols = []
    for fc in free:
        v = [f.zero] * m.cols
        v[fc] = f.one
        for k, pc in enumerate(pivots):
            v[pc] = f.sub(f.zero, red[k][fc])
        cols.append(v)
    return ExactMatrix.from_columns(f, cols, m.cols)


def solve_in_columns(a: ExactMatrix, y: Sequence) -> list:
    """Coordinates x with a @ x = y, for a with independent columns."""
    f = a.field
    aug = a.hstack(ExactMatrix.from_columns(f, [list(y)], a.rows))
    red, pivots = rref(aug)
    if a.cols in pivots:
        raise ValidationError("vector not in column span", "not-in-span")
    x = [f.zero] * a.cols
    for k, pc in enumerate(pivots):
        x[pc] = red[k][a.cols]
    return x


def determinant(m: ExactMatrix):
    if m.rows != m.cols:
        raise ValidationError("determinant of a non-square matrix", "bad-shape")
    n = m.rows
    if n == 0:
        return m.field.one
    f = m.field
    work = [list(r) for r in m.entries]
    det = f.one
    for c in range(n):
        piv = next((i for i in range(c, n) if work[i][c] != 0), None)
        if piv is None:
            return f.zero
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            det = f.sub(f.zero, det)
        a = work[c][c]
        det = f.mul(det, a)
        inv = f.inv(a)
        for i in range(c + 1, n):
            b = f.mul(work[i][c], inv)
            if b:
                work[i] = [f.sub(x, f.mul(b, y)) for x, y in zip(work[i], work[c])]
    return det


# --- cochain complexes -------------------------------------------------------

@dataclass(frozen=True)
class CochainComplex:
    """Terms ``dims[k]`` sit at index ``min_index + k``; ``differentials[k]``
    maps index ``min_index + k`` to the next one."""

    field: FieldConfig
    min_index: int
    dims: tuple[int, ...]
    differentials: tuple[ExactMatrix, ...]

    def __post_init__(self):
        if len(self.differentials) != max(len(self.dims) - 1, 0):
            raise MalformedComplex(
                f"{len(self.dims)} terms need {max(len(self.dims) - 1, 0)} differentials, "
                f"got {len(self.differentials)}"
            )
        for k, d in enumerate(self.differentials):
            if d.shape != (self.dims[k + 1], self.dims[k]):
                raise MalformedComplex(
                    f"d^{self.min_index + k} has shape {d.shape}, "
                    f"expected {(self.dims[k + 1], self.dims[k])}"
                )
            if d.field != self.field:
                raise MalformedComplex("differential over a different field")
        for k in range(len(self.differentials) - 1):
            if not (self.differentials[k + 1] @ self.differentials[k]).is_zero():
                raise MalformedComplex(f"d^{self.min_index + k + 1} d^{self.min_index + k} != 0")

    @classmethod
    def zero(cls, fld: FieldConfig) -> "CochainComplex":
        return cls(fld, 0, (), ())

    @property
    def max_index(self) -> int:
        return self.min_index + len(self.dims) - 1

    def indices(self) -> range:
        return range(self.min_index, self.min_index + len(self.dims))

    def dim(self, i: int) -> int:
        k = i - self.min_index
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def d(self, i: int) -> ExactMatrix:
        """d^i : C^i -> C^{i+1}, a zero matrix outside the stored range."""
        k = i - self.min_index
        if 0 <= k < len(self.differentials):
            return self.differentials[k]
        return ExactMatrix.zeros(self.field, self.dim(i + 1), self.dim(i))

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * self.dim(i) for i in self.indices())


@dataclass(frozen=True)
class CohomologyProfile:
    min_index: int
    dims: tuple[int, ...]
    representatives: tuple[ExactMatrix, ...] = field(repr=False, compare=False)

    def dim(self, i: int) -> int:
        k = i - self.min_index
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def basis(self, i: int) -> ExactMatrix | None:
        k = i - self.min_index
        return self.representatives[k] if 0 <= k < len(self.representatives) else None

    def nonzero_indices(self) -> list[int]:
        return [self.min_index + k for k, h in enumerate(self.dims) if h]

    def as_dict(self) -> dict[int, int]:
        return {self.min_index + k: h for k, h in enumerate(self.dims)}

    def euler_characteristic(self) -> int:
        return sum((-1) ** (self.min_index + k) * h for k, h in enumerate(self.dims))


def _image_basis(d: ExactMatrix) -> ExactMatrix:
    return d.select_columns(pivot_columns(d))


def cohomology(c: CochainComplex, with_basis: bool = True) -> CohomologyProfile:
    """Cohomology dims, and (optionally) representative cocycles.

    The representatives of H^i are the cocycle basis vectors that survive a
    left-to-right independence scan after the image of d^{i-1}, so the choice
    is fully determined by column order.
    """
    fld = c.field
    dims, reps = [], []
    for i in c.indices():
        d_out, d_in = c.d(i), c.d(i - 1)
        if not with_basis:
            dims.append(c.dim(i) - rank(d_out) - rank(d_in))
            continue
        z = kernel_basis(d_out)
        b = _image_basis(d_in)
        if z.cols == 0:
            dims.append(0)
            reps.append(ExactMatrix.zeros(fld, c.dim(i), 0))
            continue
        piv = pivot_columns(b.hstack(z))
        keep = [j - b.cols for j in piv if j >= b.cols]
        dims.append(len(keep))
        reps.append(z.select_columns(keep))
    return CohomologyProfile(c.min_index, tuple(dims), tuple(reps))


@dataclass(frozen=True)
class ChainMap:
    """Degree-preserving map of complexes; ``maps[i]`` : source^i -> target^i."""

    source: CochainComplex
    target: CochainComplex
    maps: Mapping[int, ExactMatrix]

    def component(self, i: int) -> ExactMatrix:
        m = self.maps.get(i)
        if m is None:
            return ExactMatrix.zeros(self.source.field, self.target.dim(i), self.source.dim(i))
        return m

    def validate(self) -> None:
        s, t = self.source, self.target
        lo = min(s.min_index, t.min_index) - 1
        hi = max(s.max_index, t.max_index) + 1
        for i in range(lo, hi + 1):
            f = self.component(i)
            if f.shape != (t.dim(i), s.dim(i)):
                raise NotAChainMap(f"component {i} has shape {f.shape}")
        for i in range(lo, hi):
            if self.component(i + 1) @ s.d(i) != t.d(i) @ self.component(i):
                raise NotAChainMap(f"square at index {i} does not commute")


def identity_chain_map(c: CochainComplex) -> ChainMap:
    return ChainMap(c, c, {i: ExactMatrix.identity(c.field, c.dim(i)) for i in c.indices()})


def induced_map_on_cohomology(
    f: ChainMap,
    i: int,
    source_profile: CohomologyProfile | None = None,
    target_profile: CohomologyProfile | None = None,
    validate: bool = True,
) -> ExactMatrix:
    """Matrix of H^i(f) in the representative bases of the two profiles."""
    if validate:
        f.validate()
    fld = f.source.field
    sp = source_profile or cohomology(f.source)
    tp = target_profile or cohomology(f.target)
    h_src, h_tgt = sp.dim(i), tp.dim(i)
    if h_src == 0 or h_tgt == 0:
        return ExactMatrix.zeros(fld, h_tgt, h_src)
    reps_t = tp.basis(i)
    frame = reps_t.hstack(_image_basis(f.target.d(i - 1)))
    images = f.component(i) @ sp.basis(i)
    cols = [solve_in_columns(frame, y)[:h_tgt] for y in images.columns()]
    return ExactMatrix.from_columns(fld, cols, h_tgt)

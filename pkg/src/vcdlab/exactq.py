"""Exact linear algebra over the rationals.

Scalars are ``int`` or ``fractions.Fraction``; both are exact and compare and
hash consistently, so integral entries are kept as plain ints for speed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


class FiltrationError(ValueError):
    """A linear map does not respect cocycle/coboundary filtrations."""


def q(x) -> Rational:
    """Coerce to an exact scalar. Accepts ints, Fractions and "p/q" strings."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return q(Fraction(x))
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or string")
    return q(Fraction(x))


def _norm(x):
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def _div(a, b):
    if type(a) is int and type(b) is int:
        return _norm(Fraction(a, b))
    return _norm(a / b)


def qstr(x: Rational) -> str:
    x = q(x)
    if isinstance(x, int):
        return str(x)
    return f"{x.numerator}/{x.denominator}"


class QMatrix:
    """Immutable dense matrix over Q, stored row-major."""

    __slots__ = ("rows", "cols", "entries", "_hash", "_colnz")

    def __init__(self, rows: int, cols: int, entries: Iterable = None):
        if entries is None:
            entries = (0,) * (rows * cols)
        entries = tuple(q(e) for e in entries)
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = entries
        self._hash = None
        self._colnz = None

    @classmethod
    def _raw(cls, rows, cols, entries):
        # entries already normalized
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = cols
        m.entries = tuple(entries)
        m._hash = None
        m._colnz = None
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int = None) -> "QMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols required for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, (e for r in rows for e in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls._raw(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        e = [0] * (n * n)
        for i in range(n):
            e[i * n + i] = 1
        return cls._raw(n, n, e)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def tolist(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    @property
    def T(self) -> "QMatrix":
        r, c, e = self.rows, self.cols, self.entries
        return QMatrix._raw(c, r, (e[i * c + j] for j in range(c) for i in range(r)))

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        n, m = other.rows, other.cols
        ocols = [[(k, other.entries[k * m + j]) for k in range(n) if other.entries[k * m + j]]
                 for j in range(m)]
        out = []
        for i in range(self.rows):
            row = self.row(i)
            for col in ocols:
                s = 0
                for k, v in col:
                    a = row[k]
                    if a:
                        s += a * v
                out.append(_norm(s))
        return QMatrix._raw(self.rows, m, out)

    def _columns(self):
        if self._colnz is None:
            c, e = self.cols, self.entries
            cols = [[] for _ in range(c)]
            for k, x in enumerate(e):
                if x:
                    cols[k % c].append((k // c, x))
            self._colnz = cols
        return self._colnz

    def apply(self, v: Sequence) -> list:
        """Matrix-vector product."""
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        out = [0] * self.rows
        cols = self._columns()
        for k, x in enumerate(v):
            if x:
                for i, a in cols[k]:
                    out[i] += a * x
        return [_norm(y) for y in out]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(qstr(x) for x in self.row(i)) for i in range(self.rows))
        return f"QMatrix({self.rows}x{self.cols}: [{body}])"


def _rref_rows(rows: list, ncols: int):
    """In-place RREF of a list of mutable rows. Returns (rows, pivots); zero rows dropped."""
    rows = [r for r in rows if any(r)]
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        p = prow[c]
        if p != 1:
            if p == -1:
                for j in range(c, ncols):
                    if prow[j]:
                        prow[j] = -prow[j]
            else:
                for j in range(c, ncols):
                    if prow[j]:
                        prow[j] = _div(prow[j], p)
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            f = row[c]
            if f:
                for j in nz:
                    row[j] = _norm(row[j] - f * prow[j])
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rref(m: QMatrix) -> QMatrix:
    """Reduced row echelon form, keeping the original row count (zero rows at the bottom)."""
    rows, _ = _rref_rows([list(m.row(i)) for i in range(m.rows)], m.cols)
    flat = [x for r in rows for x in r]
    flat.extend([0] * ((m.rows - len(rows)) * m.cols))
    return QMatrix._raw(m.rows, m.cols, flat)


def rank(m: QMatrix) -> int:
    _, piv = _rref_rows([list(m.row(i)) for i in range(m.rows)], m.cols)
    return len(piv)


class Subspace:
    """A linear subspace of Q^d, stored by its canonical RREF basis.

    Two instances compare equal exactly when they span the same space.
    """

    __slots__ = ("ambient_dim", "basis", "pivots", "_rownz")

    def __init__(self, ambient_dim: int, basis: QMatrix, pivots: tuple = None):
        if basis.cols != ambient_dim:
            raise ValueError("basis column count must equal ambient dimension")
        self.ambient_dim = ambient_dim
        self.basis = basis
        self._rownz = None
        if pivots is None:
            pivots = tuple(next(j for j, x in enumerate(basis.row(i)) if x)
                           for i in range(basis.rows))
        self.pivots = pivots

    @classmethod
    def _from_rows(cls, rows: list, d: int) -> "Subspace":
        rows, piv = _rref_rows(rows, d)
        flat = []
        for r in rows:
            flat.extend(r)
        return cls(d, QMatrix._raw(len(rows), d, flat), tuple(piv))

    @classmethod
    def zero(cls, d: int) -> "Subspace":
        return cls(d, QMatrix.zeros(0, d), ())

    @classmethod
    def full(cls, d: int) -> "Subspace":
        return cls(d, QMatrix.identity(d), tuple(range(d)))

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def vectors(self) -> list:
        return [list(self.basis.row(i)) for i in range(self.basis.rows)]

    def _sparse_rows(self):
        if self._rownz is None:
            d = self.ambient_dim
            e = self.basis.entries
            self._rownz = [
                [(j, e[i * d + j]) for j in range(pc + 1, d) if e[i * d + j]]
                for i, pc in enumerate(self.pivots)
            ]
        return self._rownz

    def reduce(self, v: Sequence) -> list:
        """Subtract the component along this space so that pivot coordinates vanish."""
        v = list(v)
        for pc, tail in zip(self.pivots, self._sparse_rows()):
            f = v[pc]
            if f:
                v[pc] = 0
                for j, x in tail:
                    v[j] = _norm(v[j] - f * x)
        return v

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.vectors())

    def coordinates(self, v: Sequence) -> list:
        """Coefficients of v in the canonical basis; v must lie in the space."""
        if not self.contains(v):
            raise ValueError("vector is not in the subspace")
        return [v[pc] for pc in self.pivots]

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return Subspace._from_rows(self.vectors() + other.vectors(), self.ambient_dim)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, basis={self.vectors()})"


def subspace_from_spanning(vectors: Iterable[Sequence], d: int) -> Subspace:
    rows = []
    for v in vectors:
        v = [q(x) for x in v]
        if len(v) != d:
            raise ValueError(f"vector of length {len(v)} in Q^{d}")
        rows.append(v)
    return Subspace._from_rows(rows, d)


def kernel_basis(m: QMatrix) -> Subspace:
    """Null space {v : m v = 0} as a canonical subspace of Q^cols."""
    n = m.cols
    rows, piv = _rref_rows([list(m.row(i)) for i in range(m.rows)], n)
    pivset = set(piv)
    free = [j for j in range(n) if j not in pivset]
    vecs = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for r, pc in zip(rows, piv):
            x = r[f]
            if x:
                v[pc] = -x
        vecs.append(v)
    # free-variable basis is already reduced once reordered by leading index
    return Subspace._from_rows(vecs, n)


def image_basis(m: QMatrix) -> Subspace:
    """Column space of m as a canonical subspace of Q^rows."""
    t = m.T
    return Subspace._from_rows([list(t.row(i)) for i in range(t.rows)], m.rows)


def complement_in(cocycles: Subspace, coboundaries: Subspace) -> Subspace:
    """Canonical complement of ``coboundaries`` inside ``cocycles``.

    It is the part of ``cocycles`` vanishing on the pivot coordinates of
    ``coboundaries``; every cocycle reduces into it uniquely modulo coboundaries.
    """
    d = cocycles.ambient_dim
    kill = coboundaries.pivots
    if cocycles.is_full:
        keep = set(range(d)) - set(kill)
        rows = []
        for j in sorted(keep):
            v = [0] * d
            v[j] = 1
            rows.append(v)
        return Subspace(d, QMatrix._raw(len(rows), d, (x for r in rows for x in r)), tuple(sorted(keep)))
    if not kill:
        return cocycles
    zb = cocycles.basis
    # coefficients a with sum_i a_i z_i vanishing on the killed coordinates
    constraint = QMatrix._raw(len(kill), zb.rows, (zb[i, c] for c in kill for i in range(zb.rows)))
    coeffs = kernel_basis(constraint)
    vecs = []
    for a in coeffs.vectors():
        v = [0] * d
        for i, ai in enumerate(a):
            if ai:
                row = zb.row(i)
                for j in range(d):
                    if row[j]:
                        v[j] = v[j] + ai * row[j]
        vecs.append([_norm(x) for x in v])
    return Subspace._from_rows(vecs, d)


def quotient_coordinates(v: Sequence, coboundaries: Subspace, reps: Subspace) -> list:
    """Coordinates of the class of v in cocycles/coboundaries w.r.t. the basis ``reps``."""
    w = coboundaries.reduce(v)
    return reps.coordinates(w)


def induced_map_on_quotient(
    map: QMatrix,
    src_cocycles: Subspace,
    src_coboundaries: Subspace,
    dst_cocycles: Subspace,
    dst_coboundaries: Subspace,
    check: bool = True,
) -> QMatrix:
    """Matrix of the map induced between cocycles/coboundaries quotients.

    Source classes are represented by the canonical complement of the
    coboundaries inside the cocycles (see ``complement_in``); columns of the
    result are destination coordinates of the images of those representatives.
    """
    if map.cols != src_cocycles.ambient_dim or map.rows != dst_cocycles.ambient_dim:
        raise ValueError("map shape does not match the cochain spaces")
    if check:
        if not src_cocycles.contains_space(src_coboundaries):
            raise FiltrationError("source coboundaries are not cocycles")
        if not dst_cocycles.contains_space(dst_coboundaries):
            raise FiltrationError("destination coboundaries are not cocycles")
        for b in src_coboundaries.vectors():
            if not dst_coboundaries.contains(map.apply(b)):
                raise FiltrationError("map does not send coboundaries to coboundaries")
    src_reps = complement_in(src_cocycles, src_coboundaries)
    dst_reps = complement_in(dst_cocycles, dst_coboundaries)
    cols = []
    for r in src_reps.vectors():
        img = map.apply(r)
        w = dst_coboundaries.reduce(img)
        if check and not dst_cocycles.contains(img):
            raise FiltrationError("map does not send cocycles to cocycles")
        try:
            cols.append(dst_reps.coordinates(w))
        except ValueError:
            raise FiltrationError("image of a cocycle is not a cocycle") from None
    nr, nc = dst_reps.dim, src_reps.dim
    return QMatrix._raw(nr, nc, (cols[j][i] for i in range(nr) for j in range(nc)))

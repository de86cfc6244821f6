"""Simplicial complexes of dimension <= 2 and their rational cohomology.

Vertex labels may be any mutually orderable hashables (ints, tuples of the
same shape, ...). Simplices are kept in sorted order, so coboundary matrices
and cohomology coordinates do not depend on insertion order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

from .exactq import (
    QMatrix,
    Subspace,
    complement_in,
    image_basis,
    induced_map_on_quotient,
    kernel_basis,
)


class NotClosedError(ValueError):
    """A selection of simplices is not closed under taking faces."""


class Complex:
    def __init__(
        self,
        vertices: Iterable[Hashable] = (),
        edges: Iterable[Sequence] = (),
        triangles: Iterable[Sequence] = (),
        labels: Mapping = None,
    ):
        vs = set(vertices)
        es = set()
        for e in edges:
            a, b = e
            if a == b:
                raise ValueError(f"degenerate edge {e!r}")
            es.add(tuple(sorted((a, b))))
        ts = set()
        for t in triangles:
            t = tuple(sorted(t))
            if len(set(t)) != 3:
                raise ValueError(f"degenerate triangle {t!r}")
            ts.add(t)
        for e in es:
            if not set(e) <= vs:
                raise NotClosedError(f"edge {e!r} has an endpoint that is not a vertex")
        for t in ts:
            for f in combinations(t, 2):
                if f not in es:
                    raise NotClosedError(f"triangle {t!r} is missing edge {f!r}")
        self.vertices = tuple(sorted(vs))
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        vi = self.vertex_index
        self.edges = tuple(sorted((vi[a], vi[b]) for a, b in es))
        self.triangles = tuple(sorted(tuple(vi[x] for x in t) for t in ts))
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        self.triangle_index = {t: i for i, t in enumerate(self.triangles)}
        self.labels = dict(labels or {})

    def simplices(self, p: int) -> tuple:
        if p == 0:
            return tuple((i,) for i in range(len(self.vertices)))
        if p == 1:
            return self.edges
        if p == 2:
            return self.triangles
        return ()

    def count(self, p: int) -> int:
        return len(self.simplices(p))

    @property
    def dimension(self) -> int:
        for p in (2, 1, 0):
            if self.count(p):
                return p
        return -1

    def edge_labels(self) -> list:
        return [(self.vertices[a], self.vertices[b]) for a, b in self.edges]

    def triangle_labels(self) -> list:
        return [tuple(self.vertices[i] for i in t) for t in self.triangles]

    def full(self) -> "Subcomplex":
        return Subcomplex(self, (True,) * self.count(0), (True,) * self.count(1), (True,) * self.count(2))

    def empty(self) -> "Subcomplex":
        return Subcomplex(self, (False,) * self.count(0), (False,) * self.count(1), (False,) * self.count(2))

    def induced(self, vertices: Iterable[Hashable]) -> "Subcomplex":
        """Largest subcomplex whose vertices are the given ones."""
        keep = {self.vertex_index[v] for v in vertices}
        vm = tuple(i in keep for i in range(self.count(0)))
        em = tuple(a in keep and b in keep for a, b in self.edges)
        tm = tuple(all(x in keep for x in t) for t in self.triangles)
        return Subcomplex(self, vm, em, tm)

    def closure(self, vertices=(), edges=(), triangles=()) -> "Subcomplex":
        """Smallest subcomplex containing the given simplices (by label)."""
        vset = {self.vertex_index[v] for v in vertices}
        eset = set()
        tset = set()
        for t in triangles:
            ti = tuple(sorted(self.vertex_index[x] for x in t))
            tset.add(self.triangle_index[ti])
            for f in combinations(ti, 2):
                eset.add(self.edge_index[f])
        for e in edges:
            a, b = sorted(self.vertex_index[x] for x in e)
            eset.add(self.edge_index[(a, b)])
        for i in eset:
            vset.update(self.edges[i])
        return Subcomplex(
            self,
            tuple(i in vset for i in range(self.count(0))),
            tuple(i in eset for i in range(self.count(1))),
            tuple(i in tset for i in range(self.count(2))),
        )

    def __eq__(self, other):
        if not isinstance(other, Complex):
            return NotImplemented
        return (self.vertices, self.edges, self.triangles) == (other.vertices, other.edges, other.triangles)

    def __hash__(self):
        return hash((self.vertices, self.edges, self.triangles))

    def __repr__(self):
        return f"Complex(V={self.count(0)}, E={self.count(1)}, T={self.count(2)})"


@dataclass(frozen=True)
class Subcomplex:
    parent: Complex
    vertex_mask: tuple
    edge_mask: tuple
    triangle_mask: tuple

    def mask(self, p: int) -> tuple:
        return (self.vertex_mask, self.edge_mask, self.triangle_mask)[p]

    def indices(self, p: int) -> list:
        return [i for i, b in enumerate(self.mask(p)) if b]

    def is_closed(self) -> bool:
        k = self.parent
        for i in self.indices(1):
            a, b = k.edges[i]
            if not (self.vertex_mask[a] and self.vertex_mask[b]):
                return False
        for i in self.indices(2):
            for f in combinations(k.triangles[i], 2):
                if not self.edge_mask[k.edge_index[f]]:
                    return False
        return True

    def vertices(self) -> list:
        return [self.parent.vertices[i] for i in self.indices(0)]

    def to_complex(self) -> Complex:
        k = self.parent
        lab = k.vertices
        return Complex(
            self.vertices(),
            [(lab[a], lab[b]) for a, b in (k.edges[i] for i in self.indices(1))],
            [tuple(lab[x] for x in k.triangles[i]) for i in self.indices(2)],
        )

    @property
    def dimension(self) -> int:
        for p in (2, 1, 0):
            if any(self.mask(p)):
                return p
        return -1

    def is_empty(self) -> bool:
        return not any(self.vertex_mask)

    def _combine(self, other: "Subcomplex", op) -> "Subcomplex":
        if other.parent is not self.parent and other.parent != self.parent:
            raise ValueError("subcomplexes of different complexes")
        return Subcomplex(
            self.parent,
            *(tuple(op(a, b) for a, b in zip(self.mask(p), other.mask(p))) for p in range(3)),
        )

    def __or__(self, other):
        return self._combine(other, lambda a, b: a or b)

    def __and__(self, other):
        return self._combine(other, lambda a, b: a and b)

    def __le__(self, other):
        return all(not a or b for p in range(3) for a, b in zip(self.mask(p), other.mask(p)))

    def relative_to(self, ambient: "Subcomplex") -> "Subcomplex":
        """This subcomplex viewed inside ``ambient.to_complex()``."""
        if not self <= ambient:
            raise NotClosedError("not contained in the ambient subcomplex")
        return Subcomplex(
            ambient.to_complex(),
            *(tuple(self.mask(p)[i] for i in ambient.indices(p)) for p in range(3)),
        )

    def __repr__(self):
        return f"Subcomplex(V={sum(self.vertex_mask)}, E={sum(self.edge_mask)}, T={sum(self.triangle_mask)})"


def coboundary(k: Complex, p: int) -> QMatrix:
    """Matrix of the coboundary C^p -> C^{p+1} (rows: (p+1)-simplices)."""
    if p == 0:
        nv = k.count(0)
        e = []
        for a, b in k.edges:
            row = [0] * nv
            row[a] = -1
            row[b] = 1
            e.extend(row)
        return QMatrix._raw(k.count(1), nv, e)
    if p == 1:
        ne = k.count(1)
        e = []
        for a, b, c in k.triangles:
            row = [0] * ne
            row[k.edge_index[(b, c)]] = 1
            row[k.edge_index[(a, c)]] = -1
            row[k.edge_index[(a, b)]] = 1
            e.extend(row)
        return QMatrix._raw(k.count(2), ne, e)
    if p == 2:
        return QMatrix.zeros(0, k.count(2))
    raise ValueError(f"degree {p} not supported")


@dataclass(frozen=True)
class CohomologySpace:
    degree: int
    cocycles: Subspace
    coboundaries: Subspace
    representatives: Subspace

    @property
    def quotient_dim(self) -> int:
        return self.cocycles.dim - self.coboundaries.dim

    @property
    def representative_basis(self) -> QMatrix:
        return self.representatives.basis

    def coordinates(self, cocycle) -> list:
        return self.representatives.coordinates(self.coboundaries.reduce(cocycle))


def cohomology_space(k: Complex, p: int) -> CohomologySpace:
    if p not in (0, 1, 2):
        raise ValueError(f"degree {p} not supported")
    z = kernel_basis(coboundary(k, p)) if p < 2 else Subspace.full(k.count(2))
    if p == 0:
        b = Subspace.zero(k.count(0))
    else:
        b = image_basis(coboundary(k, p - 1))
    return CohomologySpace(p, z, b, complement_in(z, b))


def betti(k: Complex, p: int) -> int:
    return cohomology_space(k, p).quotient_dim


def _projection(k: Complex, l: Subcomplex, p: int) -> QMatrix:
    idx = l.indices(p)
    n = k.count(p)
    e = []
    for i in idx:
        row = [0] * n
        row[i] = 1
        e.extend(row)
    return QMatrix._raw(len(idx), n, e)


def restriction_on_hp(
    k: Complex,
    l: Subcomplex,
    p: int,
    source: CohomologySpace = None,
    check: bool = True,
):
    """Induced map H^p(k) -> H^p(l) and its kernel in H^p(k) coordinates.

    ``source`` may carry a precomputed ``cohomology_space(k, p)``.
    """
    if l.parent != k:
        raise ValueError("subcomplex does not belong to this complex")
    if not l.is_closed():
        raise NotClosedError("restriction target is not a closed subcomplex")
    hk = source if source is not None else cohomology_space(k, p)
    hl = cohomology_space(l.to_complex(), p)
    m = induced_map_on_quotient(
        _projection(k, l, p), hk.cocycles, hk.coboundaries, hl.cocycles, hl.coboundaries, check=check
    )
    return m, kernel_basis(m)


def disjoint_union(ks: Sequence[Complex]) -> Complex:
    """Coproduct; the vertex v of the i-th complex becomes (i, v)."""
    vs, es, ts = [], [], []
    for i, k in enumerate(ks):
        vs.extend((i, v) for v in k.vertices)
        es.extend(((i, a), (i, b)) for a, b in k.edge_labels())
        ts.extend(tuple((i, x) for x in t) for t in k.triangle_labels())
    return Complex(vs, es, ts)


def cycle_graph(n: int, tag=None) -> Complex:
    """Triangulated circle on n >= 3 vertices."""
    if n < 3:
        raise ValueError("a simplicial circle needs at least 3 vertices")
    lab = (lambda i: i) if tag is None else (lambda i: (tag, i))
    return Complex([lab(i) for i in range(n)], [(lab(i), lab((i + 1) % n)) for i in range(n)])


def path_graph(n: int, tag=None) -> Complex:
    lab = (lambda i: i) if tag is None else (lambda i: (tag, i))
    return Complex([lab(i) for i in range(n)], [(lab(i), lab(i + 1)) for i in range(n - 1)])

"""Generators for the concrete arrangement families.

* generic hyperplanes in P^m with exact 0/1-pattern enumeration,
* the n x n grid of lines swept by a half-plane,
* the pencil construction whose restriction kernels are indexed by pairs.

Projective objects are homogeneous rational vectors; emptiness and
containment are decided by rank.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .cohomology import Complex, Subcomplex
from .exactq import QMatrix, q, rank

MAX_RETRIES = 1000


class GenerationError(RuntimeError):
    """Rejection sampling ran out of retries."""


def _rank(vectors) -> int:
    vectors = list(vectors)
    if not vectors:
        return 0
    return rank(QMatrix.from_rows(vectors))


def _cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _random_vector(rng: random.Random, size: int, height: int) -> tuple:
    while True:
        v = tuple(rng.randint(-height, height) for _ in range(size))
        if any(v):
            return v


def _in_general_position(vectors, dim: int) -> bool:
    """Every subset of at most ``dim`` vectors is linearly independent."""
    for k in range(1, min(dim, len(vectors)) + 1):
        for sub in combinations(vectors, k):
            if _rank(sub) < k:
                return False
    return True


# -- generic hyperplanes ---------------------------------------------------


@dataclass(frozen=True)
class HyperplaneFamily:
    m: int
    hyperplanes: tuple
    seed: int = None

    def __len__(self):
        return len(self.hyperplanes)

    def is_generic(self) -> bool:
        return _in_general_position(self.hyperplanes, self.m + 1)


def gen_generic_hyperplanes(m: int, count: int, seed: int, height: int = None) -> HyperplaneFamily:
    if m < 1 or count < 1:
        raise ValueError("need m >= 1 and count >= 1")
    rng = random.Random(seed)
    if height is None:
        height = max(4, 2 * count)
    vecs = []
    for _ in range(MAX_RETRIES):
        v = _random_vector(rng, m + 1, height)
        cand = vecs + [v]
        if _in_general_position_with(cand, m + 1):
            vecs = cand
            if len(vecs) == count:
                return HyperplaneFamily(m, tuple(tuple(q(x) for x in h) for h in vecs), seed)
    raise GenerationError(f"no generic family of {count} hyperplanes in P^{m} after {MAX_RETRIES} draws")


def _in_general_position_with(vectors, dim: int) -> bool:
    # only subsets containing the newest vector need checking
    *old, new = vectors
    for k in range(min(dim, len(vectors))):
        for sub in combinations(old, k):
            if _rank(sub + (new,)) < k + 1:
                return False
    return True


@dataclass(frozen=True)
class Pattern:
    bits: tuple

    def __len__(self):
        return len(self.bits)

    @property
    def on(self) -> frozenset:
        return frozenset(i for i, b in enumerate(self.bits) if b)

    def __str__(self):
        return "".join("1" if b else "0" for b in self.bits)


def enumerate_realizable_patterns(f: HyperplaneFamily) -> set:
    """All 0/1-patterns with a nonempty realization in P^m.

    The "on" set S is realizable iff its flat is nonempty (rank <= m) and no
    "off" hyperplane contains the flat (appending it raises the rank).
    Works for non-generic families too.
    """
    hs = f.hyperplanes
    n = len(hs)
    top = f.m + 1
    out = set()

    def rk(idx):
        return _rank([hs[i] for i in idx])

    def visit(idx: tuple, r: int):
        if all(rk(idx + (j,)) > r for j in range(n) if j not in idx):
            s = set(idx)
            out.add(Pattern(tuple(i in s for i in range(n))))
        start = idx[-1] + 1 if idx else 0
        for j in range(start, n):
            nxt = idx + (j,)
            r2 = rk(nxt)
            if r2 < top:
                visit(nxt, r2)

    visit((), 0)
    return out


# -- grid of lines ---------------------------------------------------------


@dataclass
class GridInstance:
    n: int
    complex: Complex
    sweep_normal: tuple
    vertex_values: dict
    critical_values: list
    interior: list = field(default_factory=list)


def gen_grid(n: int) -> GridInstance:
    """Lines x=i and y=j (1 <= i, j <= n) clipped to the box [0, n+1]^2."""
    if n < 2:
        raise ValueError("grid needs n >= 2")
    top = n + 1
    verts = set()
    edges = []
    for i in range(1, n + 1):
        for line in ([(i, y) for y in range(top + 1)], [(x, i) for x in range(top + 1)]):
            verts.update(line)
            edges.extend(zip(line, line[1:]))
    k = Complex(verts, edges)
    a, b = 1, Fraction(1, n + 1)
    values = {v: q(a * v[0] + b * v[1]) for v in k.vertices}
    interior = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    crit = sorted({values[v] for v in interior})
    return GridInstance(n, k, (q(a), q(b)), values, crit, interior)


def halfplane_subcomplex(g: GridInstance, x) -> Subcomplex:
    """Vertices with sweep value <= x and the edges between them."""
    x = q(x)
    return g.complex.induced(v for v in g.complex.vertices if g.vertex_values[v] <= x)


def grid_sweep_tests(g: GridInstance) -> list:
    """One half-plane per sweep interval: below every crossing, then at each critical value."""
    lo = min(g.vertex_values.values()) - 1
    positions = [lo] + list(g.critical_values)
    return [(f"x={p}", halfplane_subcomplex(g, p)) for p in positions]


# -- pencil construction ---------------------------------------------------


PENCIL_CENTER = (1, 0, 0)


@dataclass
class PencilInstance:
    n: int
    l_lines: tuple
    m_lines: tuple
    incidence_graph: Complex
    test_points: list
    sub_sellocal: dict
    pair_points: dict

    def tests(self) -> list:
        return [(t, self.sub_sellocal[t]) for t in self.test_points]


def _meet(u, v):
    return _cross(u, v)


def _pencil_ok(lines) -> bool:
    n = len(lines)
    if not _in_general_position(lines, 3):
        return False
    if any(_dot(l, PENCIL_CENTER) == 0 for l in lines):
        return False
    pts = {pair: _meet(lines[pair[0]], lines[pair[1]]) for pair in combinations(range(n), 2)}
    for a, b in combinations(pts, 2):
        join = _cross(pts[a], pts[b])
        if not any(join):
            return False
        if _dot(join, PENCIL_CENTER) == 0:
            return False
    return True


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def pencil_parameter(point) -> tuple:
    """[X0:X1] of the pencil line through [1:0:0] and ``point``."""
    return (q(point[2]), q(-point[1]))


def gen_pencil_instance(n: int, seed: int, height: int = None) -> PencilInstance:
    if n < 2:
        raise ValueError("pencil instance needs n >= 2")
    rng = random.Random(seed)
    height = height or max(6, 3 * n)
    for _ in range(MAX_RETRIES):
        ls = tuple(_random_vector(rng, 3, height) for _ in range(n))
        if _pencil_ok(ls):
            break
    else:
        raise GenerationError("could not place L-lines")
    for _ in range(MAX_RETRIES):
        ms = tuple(_random_vector(rng, 3, height) for _ in range(2 * n))
        if _in_general_position(ms, 3):
            break
    else:
        raise GenerationError("could not place M-lines")

    # M-lines in order M_1, M_1', M_2, M_2', ... ; nodes ("M", k) and ("P", a, b)
    mnodes = [("M", k) for k in range(2 * n)]
    pnodes = [("P", a, b) for a, b in combinations(range(2 * n), 2)]
    edges = []
    for _, a, b in pnodes:
        edges.append((("M", a), ("P", a, b)))
        edges.append((("M", b), ("P", a, b)))
    g = Complex(mnodes + pnodes, edges)

    def pair_nodes(i):
        return [2 * i, 2 * i + 1]

    def union_nodes(lines):
        lines = sorted(lines)
        return [("M", k) for k in lines] + [("P", a, b) for a, b in combinations(lines, 2)]

    tests = ["generic"]
    subs = {}
    base = []
    for k in range(n):
        base.extend(union_nodes(pair_nodes(k)))
    subs["generic"] = g.induced(base)
    pair_points = {}
    for i, j in combinations(range(n), 2):
        label = f"x_{i + 1},{j + 1}"
        tests.append(label)
        pij = _meet(ls[i], ls[j])
        pair_points[label] = pencil_parameter(pij)
        nodes = union_nodes(pair_nodes(i) + pair_nodes(j))
        for k in range(n):
            if k not in (i, j):
                nodes.extend(union_nodes(pair_nodes(k)))
        subs[label] = g.induced(nodes)
    ls = tuple(tuple(q(x) for x in v) for v in ls)
    ms = tuple(tuple(q(x) for x in v) for v in ms)
    return PencilInstance(n, ls, ms, g, tests, subs, pair_points)


# -- sweep families: n -> (complex, [(label, subcomplex), ...]) ------------


def grid_family(n: int):
    g = gen_grid(n)
    return g.complex, grid_sweep_tests(g)


def hyperplane_point_model(f: HyperplaneFamily):
    """Degree-0 model: one vertex per hyperplane, one test per realizable pattern."""
    k = Complex(range(len(f)))
    tests = [(str(pat), k.induced(pat.on)) for pat in sorted(enumerate_realizable_patterns(f), key=str)]
    return k, tests


@dataclass(frozen=True)
class HyperplaneSweep:
    """n -> model of n+1 generic hyperplanes in P^m."""

    m: int
    seed: int

    def __call__(self, n: int):
        return hyperplane_point_model(gen_generic_hyperplanes(self.m, n + 1, self.seed + n))


@dataclass(frozen=True)
class PencilSweep:
    seed: int

    def __call__(self, n: int):
        inst = gen_pencil_instance(n, self.seed + n)
        return inst.incidence_graph, inst.tests()


def constant_family(n: int):
    """A circle tested n times against itself."""
    from .cohomology import cycle_graph

    k = cycle_graph(max(3, n))
    return k, [(f"t{i}", k.full()) for i in range(n)]

"""Degree-p membership, epsilon-nets and fractional Helly checks on triples
(ambient complex, family of Z subcomplexes, family of test sets X).

A test set X is stored only through its intersections with the Z's, which
is all the degree-p membership relation needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Mapping, Sequence

import numpy as np

from .cohomology import Complex, Subcomplex, restriction_on_hp
from .exactq import QMatrix, Subspace, kernel_basis, q, rank


class PreconditionError(ValueError):
    def __init__(self, which: str, detail: str = ""):
        super().__init__(f"{which}: {detail}" if detail else which)
        self.which = which


@dataclass
class Triple:
    ambient: Complex
    z_family: list
    x_family: list  # x_family[i][j] models X_i & Z_j
    x_labels: list = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.x_labels is None:
            self.x_labels = [f"X{i}" for i in range(len(self.x_family))]
        for i, row in enumerate(self.x_family):
            if len(row) != len(self.z_family):
                raise ValueError(f"test set {i} lists {len(row)} intersections for {len(self.z_family)} members")
            for j, (xz, z) in enumerate(zip(row, self.z_family)):
                if not xz <= z:
                    raise ValueError(f"X{i} & Z{j} is not contained in Z{j}")


def _restriction_map(z: Subcomplex, x_cap_z: Subcomplex, p: int) -> QMatrix:
    m, _ = restriction_on_hp(z.to_complex(), x_cap_z.relative_to(z), p)
    return m


def in_p(z: Subcomplex, x_cap_z: Subcomplex, p: int) -> bool:
    """Z in_p X: the restriction H^p(Z) -> H^p(Z & X) is nonzero."""
    return not _restriction_map(z, x_cap_z, p).is_zero()


def membership_matrix(t: Triple, p: int) -> list:
    """memb[i][j] = Z_j in_p X_i, memoized on the shape of each intersection."""
    memo = {}
    out = []
    for row in t.x_family:
        bits = []
        for j, xz in enumerate(row):
            key = (j, xz.vertex_mask, xz.edge_mask, xz.triangle_mask)
            if key not in memo:
                memo[key] = in_p(t.z_family[j], xz, p)
            bits.append(memo[key])
        out.append(bits)
    return out


# -- general position ------------------------------------------------------


@dataclass(frozen=True)
class GeneralPositionCertificate:
    p: int
    checked_tuples: int
    max_violation: tuple = None

    @property
    def valid(self) -> bool:
        return self.max_violation is None


def check_p_general_position(t: Triple, p: int, dims: Mapping = None) -> GeneralPositionCertificate:
    """Every (j+1)-fold intersection (1 <= j <= p) has dimension < p - j.

    ``dims`` may override the combinatorial dimension for given index tuples;
    an empty intersection has dimension -1 and always passes.
    """
    dims = dims or {}
    checked = 0
    worst = None
    worst_excess = 0
    zs = t.z_family
    for j in range(1, p + 1):
        for idx in combinations(range(len(zs)), j + 1):
            checked += 1
            if idx in dims:
                d = dims[idx]
            else:
                inter = zs[idx[0]]
                for i in idx[1:]:
                    inter = inter & zs[i]
                d = inter.dimension
            excess = d - (p - j) + 1
            if excess > 0 and excess > worst_excess:
                worst, worst_excess = idx, excess
    return GeneralPositionCertificate(p, checked, worst)


# -- Mayer-Vietoris splitting ----------------------------------------------


@dataclass
class MVSplit:
    global_kernel: Subspace
    summands: list
    agrees: bool
    recovered: frozenset
    direct: frozenset


def _stack(mats: Sequence[QMatrix], cols: int) -> QMatrix:
    rows = []
    for m in mats:
        rows.extend(m.tolist())
    return QMatrix.from_rows(rows, cols) if rows else QMatrix.zeros(0, cols)


def mv_kernel_split(t: Triple, x: int, p: int) -> MVSplit:
    """Compare the global restriction kernel with the per-member kernels.

    The global kernel lives in H^p of the union of the Z's; the per-member
    kernels are pulled back along the isomorphism H^p(union) -> (+) H^p(Z).
    The membership set is then read off the global kernel alone: Z in_p X
    iff the classes supported on Z are not all in the kernel.
    """
    cert = check_p_general_position(t, p)
    if not cert.valid:
        raise PreconditionError("general position", f"violated by members {cert.max_violation}")
    zs = t.z_family
    row = t.x_family[x]
    local_maps = [_restriction_map(z, xz, p) for z, xz in zip(zs, row)]
    for j, m in enumerate(local_maps):
        if m.rows and rank(m) < m.rows:
            raise PreconditionError("surjectivity", f"H^{p}(Z{j}) -> H^{p}(X{x} & Z{j}) is not onto")

    union = zs[0]
    for z in zs[1:]:
        union = union | z
    ucx = union.to_complex()
    cap = row[0]
    for xz in row[1:]:
        cap = cap | xz
    _, global_kernel = restriction_on_hp(ucx, cap.relative_to(union), p)

    phis = []
    for z in zs:
        m, _ = restriction_on_hp(ucx, z.relative_to(union), p)
        phis.append(m)
    hdim = global_kernel.ambient_dim
    if sum(m.rows for m in phis) != hdim or rank(_stack(phis, hdim)) != hdim:
        raise PreconditionError("splitting", "H^p(union) is not the direct sum of the members")

    summands = [kernel_basis(m) for m in local_maps]
    pulled = kernel_basis(_stack([r @ phi for r, phi in zip(local_maps, phis)], hdim))
    split_ok = pulled == global_kernel

    recovered = set()
    for j in range(len(zs)):
        others = [phis[i] for i in range(len(zs)) if i != j]
        supported = kernel_basis(_stack(others, hdim))
        if not global_kernel.contains_space(supported):
            recovered.add(j)
    direct = {j for j, m in enumerate(local_maps) if not m.is_zero()}
    return MVSplit(global_kernel, summands, split_ok and recovered == direct, frozenset(recovered), frozenset(direct))


# -- epsilon nets ----------------------------------------------------------


class NetTooLargeError(ValueError):
    pass


def net_size(eps, c_const, d: int) -> int:
    eps = Fraction(q(eps))
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return math.ceil(float(q(c_const)) * d * float(1 / eps) * math.log(float(1 / eps)))


def heavy_tests(memb: list, eps) -> list:
    n = len(memb[0]) if memb else 0
    thresh = Fraction(q(eps)) * n
    return [i for i, row in enumerate(memb) if sum(row) >= thresh]


def is_epsilon_net(memb: list, net: Sequence[int], eps) -> bool:
    chosen = set(net)
    return all(any(row[j] for j in chosen) for row in (memb[i] for i in heavy_tests(memb, eps)))


@dataclass
class EpsNetResult:
    net: list
    verified: bool
    success_rate: float
    net_size: int
    heavy: int
    trials: int


def epsilon_net_sample(
    t: Triple, p: int, eps, c_const, trials: int, seed: int, d: int, memb: list = None
) -> EpsNetResult:
    """Uniform random nets of size ceil(C d (1/eps) ln(1/eps)), checked exhaustively.

    Trial i draws from a generator seeded with (seed, i). ``net`` and
    ``verified`` describe trial 0.
    """
    nz = len(t.z_family)
    size = net_size(eps, c_const, d)
    if size > nz:
        raise NetTooLargeError(f"net of size {size} exceeds the {nz} members; instance too small for eps={eps}")
    if memb is None:
        memb = membership_matrix(t, p)
    heavy = [memb[i] for i in heavy_tests(memb, eps)]
    wins = 0
    first = None
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        net = sorted(int(v) for v in rng.integers(0, nz, size=size))
        ok = all(any(row[j] for j in net) for row in heavy)
        wins += ok
        if first is None:
            first = (net, ok)
    net, ok = first if first else ([], True)
    return EpsNetResult(net, ok, wins / trials if trials else 1.0, size, len(heavy), trials)


def kernel_trace_counts(memb: list, sizes: Sequence[int]) -> list:
    """(|J|, #distinct {j in J : Z_j in_p X}) for the prefixes J = {0..|J|-1}."""
    out = []
    for s in sizes:
        out.append((s, len({tuple(row[:s]) for row in memb})))
    return out


# -- fractional Helly ------------------------------------------------------


@dataclass
class HellyResult:
    hypothesis_holds: bool
    beta_achieved: Fraction
    covered: int
    total: int
    best_x: int


def fractional_helly_check(t: Triple, p: int, k: int, alpha, memb: list = None) -> HellyResult:
    nz = len(t.z_family)
    if nz > 14:
        raise ValueError("exhaustive tuple scan limited to 14 members")
    if memb is None:
        memb = membership_matrix(t, p)
    covered = set()
    best, best_x = 0, -1
    for i, row in enumerate(memb):
        members = [j for j, b in enumerate(row) if b]
        covered.update(combinations(members, k))
        if len(members) > best:
            best, best_x = len(members), i
    total = comb(nz, k)
    holds = len(covered) >= Fraction(q(alpha)) * total
    return HellyResult(holds, Fraction(best, nz), len(covered), total, best_x)


# -- instance generators ---------------------------------------------------

HEXAGON = ((2, 0), (1, 2), (-1, 2), (-2, 0), (-1, -2), (1, -2))
DIRECTIONS = ((1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1),
              (2, 1), (1, 2), (-1, 2), (-2, 1), (-2, -1), (-1, -2), (1, -2), (2, -1))


def _circles(centers, radius=1):
    verts, edges, pos = [], [], {}
    for c, (cx, cy) in enumerate(centers):
        ring = [(c, i) for i in range(len(HEXAGON))]
        for (dx, dy), v in zip(HEXAGON, ring):
            pos[v] = (cx + radius * dx, cy + radius * dy)
        verts.extend(ring)
        edges.extend(zip(ring, ring[1:] + ring[:1]))
    return Complex(verts, edges), pos


def halfplane_triple(centers, directions=DIRECTIONS, radius=1) -> Triple:
    """Disjoint hexagonal circles; tests are closed half-planes a.y <= c.

    One half-plane per direction and per vertex value, deduplicated by the
    intersections they cut out.
    """
    k, pos = _circles(centers, radius)
    zs = [k.induced([(c, i) for i in range(len(HEXAGON))]) for c in range(len(centers))]
    seen = {}
    for a in directions:
        vals = sorted({a[0] * x + a[1] * y for x, y in pos.values()})
        for c in [vals[0] - 1] + vals:
            inside = [v for v, (x, y) in pos.items() if a[0] * x + a[1] * y <= c]
            key = frozenset(inside)
            if key not in seen:
                seen[key] = (a, c)
    xf, labels = [], []
    for key, (a, c) in sorted(seen.items(), key=lambda kv: (kv[1][0], kv[1][1])):
        sub = k.induced(key)
        xf.append([sub & z for z in zs])
        labels.append(f"{a[0]}*y1+{a[1]}*y2<={c}")
    return Triple(k, zs, xf, labels, {"centers": [list(c) for c in centers], "radius": radius})


def scattered_centers(count: int, seed: int, spacing: int = 10, jitter: int = 2):
    """Centers on a jittered square lattice; hexagons of radius 1 never meet."""
    rng = np.random.default_rng(seed)
    side = math.ceil(math.sqrt(count))
    cells = rng.permutation(side * side)[:count]
    out = []
    for cell in sorted(int(c) for c in cells):
        r, c = divmod(cell, side)
        jx, jy = (int(v) for v in rng.integers(-jitter, jitter + 1, size=2))
        out.append((c * spacing + jx, r * spacing + jy))
    return out


def random_arc_triple(count: int, tests: int, seed: int, contained_fraction: float = 0.5) -> Triple:
    """Disjoint circles with synthetic test sets cutting each circle in all of it
    or in a proper arc (possibly empty). Restrictions are onto by construction."""
    rng = np.random.default_rng(seed)
    k, _ = _circles([(10 * i, 0) for i in range(count)])
    h = len(HEXAGON)
    zs = [k.induced([(c, i) for i in range(h)]) for c in range(count)]
    xf = []
    for _ in range(tests):
        row = []
        for c, z in enumerate(zs):
            if rng.random() < contained_fraction:
                row.append(z)
            else:
                length = int(rng.integers(0, h))
                start = int(rng.integers(0, h))
                row.append(k.induced([(c, (start + s) % h) for s in range(length)]))
        xf.append(row)
    return Triple(k, zs, xf)


def clustered_centers(count: int, cluster: int, seed: int):
    """``cluster`` circles packed on the left, the rest scattered far right."""
    rng = np.random.default_rng(seed)
    left = [(-10 * (i // 3) - int(rng.integers(0, 3)), 10 * (i % 3)) for i in range(cluster)]
    right = [(100 + 10 * i, int(rng.integers(-20, 21))) for i in range(count - cluster)]
    return left + right

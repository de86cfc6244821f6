"""Counting quantities: shatter functions, pattern counts, restriction-kernel
sets and log-log slope estimates of VC-density."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Callable, Iterable, Sequence

import numpy as np

from .cohomology import Complex, Subcomplex, cohomology_space, restriction_on_hp
from .exactq import Subspace

MAX_BRUTE_FORCE_GROUND = 20


@dataclass(frozen=True)
class SetSystem:
    """Subsets of ``range(ground)`` stored as int bit masks."""

    ground: int
    sets: tuple

    def __post_init__(self):
        full = (1 << self.ground) - 1
        for s in self.sets:
            if s & ~full:
                raise ValueError(f"set mask {s:#x} exceeds ground of size {self.ground}")

    @classmethod
    def from_subsets(cls, ground: int, subsets: Iterable[Iterable[int]]) -> "SetSystem":
        return cls(ground, tuple(sum(1 << i for i in set(s)) for s in subsets))


def shatter_count(s: SetSystem, subset: int) -> int:
    """Number of distinct traces ``subset & X`` over the sets X."""
    return len({x & subset for x in s.sets})


def _all_trace_counts(s: SetSystem) -> np.ndarray:
    """Trace count for every subset mask of the ground set (index = mask)."""
    if s.ground > MAX_BRUTE_FORCE_GROUND:
        raise ValueError(f"brute force limited to ground size {MAX_BRUTE_FORCE_GROUND}")
    masks = np.arange(1 << s.ground, dtype=np.int64)
    if not s.sets:
        return np.zeros(len(masks), dtype=np.int64)
    sets = np.array(sorted(set(s.sets)), dtype=np.int64)
    counts = np.empty(len(masks), dtype=np.int64)
    chunk = max(1, (1 << 22) // len(sets))
    for lo in range(0, len(masks), chunk):
        tr = np.sort(masks[lo:lo + chunk, None] & sets[None, :], axis=1)
        counts[lo:lo + chunk] = 1 + np.count_nonzero(np.diff(tr, axis=1), axis=1)
    return counts


def _popcounts(ground: int) -> np.ndarray:
    pc = np.zeros(1 << ground, dtype=np.int64)
    for b in range(ground):
        pc += (np.arange(1 << ground) >> b) & 1
    return pc


def shatter_function(s: SetSystem) -> list:
    """nu(n) for n = 0..ground: the largest trace count over n-element subsets."""
    counts = _all_trace_counts(s)
    pc = _popcounts(s.ground)
    nu = [0] * (s.ground + 1)
    for n in range(s.ground + 1):
        nu[n] = int(counts[pc == n].max())
    return nu


def vc_dimension(s: SetSystem) -> int:
    """Size of the largest shattered subset (brute force)."""
    if not s.sets:
        return -1
    counts = _all_trace_counts(s)
    pc = _popcounts(s.ground)
    return int(pc[counts == (1 << pc)].max())


def sauer_shelah_bound(n: int, d: int) -> int:
    return sum(comb(n, i) for i in range(d + 1))


def sauer_shelah_check(s: SetSystem, d: int = None) -> bool:
    """True iff nu(n) <= sum_{i<=d} C(n, i) for every n <= |ground|."""
    if d is None:
        d = vc_dimension(s)
    nu = shatter_function(s)
    return all(nu[n] <= sauer_shelah_bound(n, d) for n in range(s.ground + 1))


def pattern_count(s: SetSystem) -> int:
    """Distinct membership patterns of the ground elements across the sets."""
    patterns = {tuple((x >> y) & 1 for x in s.sets) for y in range(s.ground)}
    return len(patterns)


@dataclass
class KernelSet:
    ambient_hp_dim: int
    kernels: dict = field(default_factory=dict)

    @property
    def witness(self) -> dict:
        return self.kernels

    def __len__(self):
        return len(self.kernels)

    def dims(self) -> list:
        return sorted(k.dim for k in self.kernels)


def kernel_set(k: Complex, tests: Sequence, p: int) -> KernelSet:
    """Distinct restriction kernels H^p(k) -> H^p(test).

    ``tests`` holds Subcomplex values or (label, Subcomplex) pairs; the first
    label realizing each kernel is kept as its witness.
    """
    hk = cohomology_space(k, p)
    out = KernelSet(hk.quotient_dim)
    for i, t in enumerate(tests):
        label, sub = t if isinstance(t, tuple) else (i, t)
        _, ker = restriction_on_hp(k, sub, p, source=hk)
        out.kernels.setdefault(ker, label)
    return out


def nu_p_sweep(family_gen: Callable, p: int, n_values: Sequence[int], jobs: int = 1) -> list:
    """Exact kernel-set size for the instance ``family_gen(n)`` at each n.

    ``family_gen(n)`` returns ``(complex, tests)``. The counts are witnesses
    (lower bounds) for the supremum over all size-n subfamilies.
    """
    n_values = list(n_values)
    if jobs and jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(_sweep_point, [(family_gen, p, n) for n in n_values]))
    else:
        counts = [_sweep_point((family_gen, p, n)) for n in n_values]
    return list(zip(n_values, counts))


def _sweep_point(args) -> int:
    family_gen, p, n = args
    k, tests = family_gen(n)
    return len(kernel_set(k, tests, p))


@dataclass(frozen=True)
class SlopeFit:
    points: tuple
    slope: float
    intercept: float
    r_squared: float

    @property
    def window(self) -> tuple:
        return (self.points[0][0], self.points[-1][0])


def fit_vcd_slope(points: Sequence) -> SlopeFit:
    """Least-squares line through (log n, log count)."""
    pts = tuple((int(n), int(c)) for n, c in points)
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if any(c < 1 for _, c in pts):
        raise ValueError("counts must be >= 1")
    ns = [n for n, _ in pts]
    if len(set(ns)) == 1:
        raise ValueError("degenerate fit: all n equal")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n values must be strictly increasing")
    x = np.log(np.array(ns, dtype=float))
    y = np.log(np.array([c for _, c in pts], dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - float((resid ** 2).sum()) / ss_tot
    return SlopeFit(pts, float(slope), float(intercept), r2)


def higher_order_pattern_count(z0: Sequence, z1: Sequence, cuts: Iterable) -> int:
    """Distinct traces (z0 x z1) & X over the cuts X (sets of pairs)."""
    index = {(a, b): i * len(z1) + j for i, a in enumerate(z0) for j, b in enumerate(z1)}
    traces = set()
    for cut in cuts:
        m = 0
        for pair in cut:
            bit = index.get(tuple(pair))
            if bit is not None:
                m |= 1 << bit
        traces.add(m)
    return len(traces)


def quadrant_union_cuts(z0: Sequence, z1: Sequence) -> list:
    """Cuts {y0 <= s} u {y1 <= t}, one per combinatorial type of (s, t).

    A two-parameter family of unions of two axis-parallel half-strips.
    """
    s_vals = [min(z0) - 1] + sorted(z0)
    t_vals = [min(z1) - 1] + sorted(z1)
    return [
        frozenset((a, b) for a in z0 for b in z1 if a <= s or b <= t)
        for s in s_vals
        for t in t_vals
    ]


CSV_COLUMNS = ("family", "p", "q", "n", "count", "log_n", "log_count")


def sweep_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([
            r["family"], r["p"], r["q"], r["n"], r["count"],
            f"{math.log(r['n']):.12f}", f"{math.log(r['count']):.12f}",
        ])
    return buf.getvalue()


def sweep_rows(family: str, p: int, q: int, points: Sequence) -> list:
    return [{"family": family, "p": p, "q": q, "n": n, "count": c} for n, c in points]

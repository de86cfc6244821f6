"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the "acceptance criteria" section of the terminal summary.
"""

import os
import random
import time
from fractions import Fraction
from itertools import combinations
from math import comb

import pytest

from conftest import ACCEPTANCE
from oracles import product_traces
from vcdlab import config
from vcdlab.applications import (
    check_p_general_position,
    clustered_centers,
    epsilon_net_sample,
    fractional_helly_check,
    halfplane_triple,
    in_p,
    mv_kernel_split,
    net_size,
    random_arc_triple,
    scattered_centers,
)
from vcdlab.arrangements import (
    enumerate_realizable_patterns,
    gen_generic_hyperplanes,
    gen_grid,
    gen_pencil_instance,
    grid_family,
    grid_sweep_tests,
)
from vcdlab.cohomology import betti, restriction_on_hp
from vcdlab.vcdensity import (
    SetSystem,
    fit_vcd_slope,
    higher_order_pattern_count,
    kernel_set,
    nu_p_sweep,
    quadrant_union_cuts,
    sauer_shelah_bound,
    shatter_function,
    vc_dimension,
)


def record(num, title, ok, detail, elapsed, budget):
    within = elapsed < budget
    verdict = "PASS" if ok and within else "FAIL"
    line = f"criterion {num:>2} {verdict}: {title}: {detail} ({elapsed:.1f}s, budget {budget}s)"
    ACCEPTANCE[num] = line
    print(line)
    assert ok, line
    assert within, line


def test_criterion_01_hyperplane_patterns():
    t0 = time.perf_counter()
    bad = []
    cases = 0
    for m in (1, 2, 3):
        for count in range(3, 13):
            f = gen_generic_hyperplanes(m, count, seed=1000 * m + count)
            got = len(enumerate_realizable_patterns(f))
            want = sum(comb(count, i) for i in range(m + 1))
            cases += 1
            if got != want:
                bad.append((m, count, got, want))
    record(1, "hyperplane pattern counts", not bad, f"{cases - len(bad)}/{cases} exact", time.perf_counter() - t0, 30)


def test_criterion_02_grid_betti():
    t0 = time.perf_counter()
    bad = [n for n in range(2, 21) if betti(gen_grid(n).complex, 1) != (n - 1) ** 2]
    record(2, "grid H^1 = (n-1)^2", not bad, f"n=2..20, mismatches {bad}", time.perf_counter() - t0, 60)


def test_criterion_03_grid_kernel_spectrum():
    t0 = time.perf_counter()
    bad = []
    for n in range(2, 9):
        g = gen_grid(n)
        ks = kernel_set(g.complex, grid_sweep_tests(g), 1)
        top = (n - 1) ** 2
        if set(ks.dims()) != set(range(top + 1)) or len(ks) < top + 1:
            bad.append(n)
    record(3, "grid kernel dims fill 0..(n-1)^2", not bad, f"n=2..8, failing {bad}", time.perf_counter() - t0, 120)


def test_criterion_04_grid_slope():
    t0 = time.perf_counter()
    pts = nu_p_sweep(grid_family, 1, range(4, 17), jobs=min(8, os.cpu_count() or 1))
    fit = fit_vcd_slope(pts)
    ok = 1.7 <= fit.slope <= 2.05
    counts = [c for _, c in pts]
    record(4, "grid degree-1 slope in [1.7, 2.05]", ok,
           f"slope {fit.slope:.4f} over n=4..16, counts {counts}", time.perf_counter() - t0, 600)


def test_criterion_05_pencil_distinct():
    t0 = time.perf_counter()
    bad = []
    for n in range(2, 9):
        inst = gen_pencil_instance(n, seed=n)
        k = inst.incidence_graph
        kers = {t: restriction_on_hp(k, sub, 1)[1] for t, sub in inst.tests()}
        pairs = [kers[t] for t in inst.test_points[1:]]
        distinct = len(set(pairs)) == comb(n, 2) and kers["generic"] not in set(pairs)
        if not distinct or len(set(kers.values())) < comb(n, 2) + 1:
            bad.append(n)
    record(5, "pencil pair kernels distinct", not bad, f"n=2..8, failing {bad}", time.perf_counter() - t0, 300)


def test_criterion_06_sauer_shelah():
    t0 = time.perf_counter()
    rng = random.Random(20240601)
    bad = 0
    for _ in range(200):
        ground = rng.randint(1, 16)
        sets = tuple(rng.getrandbits(ground) for _ in range(rng.randint(1, 40)))
        s = SetSystem(ground, sets)
        d = vc_dimension(s)
        nu = shatter_function(s)
        if any(nu[n] > sauer_shelah_bound(n, d) for n in range(ground + 1)):
            bad += 1
    record(6, "Sauer-Shelah on random systems", bad == 0, f"{200 - bad}/200 within bound", time.perf_counter() - t0, 120)


def test_criterion_07_mayer_vietoris():
    t0 = time.perf_counter()
    rng = random.Random(7)
    agreed = 0
    done = 0
    seed = 0
    while done < 100:
        t = random_arc_triple(rng.randint(3, 10), 4, seed, contained_fraction=rng.random())
        seed += 1
        assert check_p_general_position(t, 1).valid
        x = rng.randrange(len(t.x_family))
        s = mv_kernel_split(t, x, 1)
        direct = {j for j, (z, xz) in enumerate(zip(t.z_family, t.x_family[x])) if in_p(z, xz, 1)}
        agreed += s.agrees and s.recovered == direct
        done += 1
    record(7, "Mayer-Vietoris kernel split", agreed == 100, f"{agreed}/100 agree", time.perf_counter() - t0, 120)


def test_criterion_08_epsilon_net():
    t0 = time.perf_counter()
    eps, c, d = config.EPSNET_EPS, config.EPSNET_C_CONST, config.EPSNET_DENSITY_BOUND
    rates = []
    for inst_seed in range(3):
        t = halfplane_triple(scattered_centers(config.EPSNET_CIRCLES, seed=inst_seed))
        res = epsilon_net_sample(t, 1, eps, c, config.EPSNET_TRIALS, seed=inst_seed, d=d)
        rates.append(res.success_rate)
    size = net_size(eps, c, d)
    record(8, "degree-1 epsilon-net", min(rates) >= 0.9,
           f"C={c}, d={d}, net size {size}, success rates {rates}", time.perf_counter() - t0, 180)


def test_criterion_09_fractional_helly():
    t0 = time.perf_counter()
    betas = []
    ok = True
    for seed in range(20):
        t = halfplane_triple(clustered_centers(12, 9, seed))
        r = fractional_helly_check(t, 1, config.HELLY_K, config.HELLY_ALPHA)
        ok &= r.hypothesis_holds and r.beta_achieved > 0
        betas.append(r.beta_achieved)
    record(9, "fractional Helly beta > 0", ok, f"min beta {min(betas)} over 20 instances", time.perf_counter() - t0, 120)


def test_criterion_10_higher_order():
    t0 = time.perf_counter()
    rng = random.Random(10)
    z = list(range(6))
    mismatches = 0
    for _ in range(50):
        cuts = []
        for _ in range(rng.randint(1, 20)):
            cut = set()
            for _ in range(rng.randint(1, 3)):
                a = set(rng.sample(z, rng.randint(0, 6)))
                b = set(rng.sample(z, rng.randint(0, 6)))
                cut |= {(i, j) for i in a for j in b}
            cuts.append(cut)
        cuts.extend(quadrant_union_cuts(z, z))
        if higher_order_pattern_count(z, z, cuts) != len(product_traces(z, z, cuts)):
            mismatches += 1
    pts = []
    for n in range(3, 9):
        zn = list(range(n))
        pts.append((n, higher_order_pattern_count(zn, zn, quadrant_union_cuts(zn, zn))))
    slope = fit_vcd_slope(pts).slope
    bound = 2.1 * 2
    ok = mismatches == 0 and slope <= bound
    record(10, "order-2 pattern counts", ok,
           f"{50 - mismatches}/50 oracle matches, slope {slope:.4f} <= {bound}", time.perf_counter() - t0, 180)

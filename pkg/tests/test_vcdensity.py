import csv
import io
import math
import random
from itertools import combinations, product
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcdlab.arrangements import (
    HyperplaneSweep,
    PencilSweep,
    constant_family,
    gen_grid,
    gen_pencil_instance,
    grid_family,
    grid_sweep_tests,
)
from vcdlab.cohomology import cycle_graph
from vcdlab.vcdensity import (
    CSV_COLUMNS,
    SetSystem,
    fit_vcd_slope,
    higher_order_pattern_count,
    kernel_set,
    nu_p_sweep,
    pattern_count,
    quadrant_union_cuts,
    sauer_shelah_bound,
    sauer_shelah_check,
    shatter_count,
    shatter_function,
    sweep_csv,
    sweep_rows,
    vc_dimension,
)

from oracles import product_traces, traces


def brute_nu(ground, sets, n):
    return max(len(traces(sets, set(sub))) for sub in combinations(range(ground), n))


def thresholds(size):
    return SetSystem.from_subsets(size, [range(t) for t in range(size + 1)])


def intervals(size):
    subs = [()] + [range(a, b + 1) for a in range(size) for b in range(a, size)]
    return SetSystem.from_subsets(size, subs)


@st.composite
def set_systems(draw, max_ground=7):
    g = draw(st.integers(1, max_ground))
    sets = draw(st.lists(st.integers(0, (1 << g) - 1), min_size=1, max_size=12))
    return SetSystem(g, tuple(sets))


def as_sets(s):
    return [{i for i in range(s.ground) if x >> i & 1} for x in s.sets]


def test_shatter_singletons():
    s = SetSystem.from_subsets(3, [[0], [1], [2]])
    assert shatter_count(s, 0b111) == len(traces(as_sets(s), {0, 1, 2})) == 3
    with_empty = SetSystem.from_subsets(3, [[], [0], [1], [2]])
    assert shatter_count(with_empty, 0b111) == 4


def test_shatter_trivial():
    assert shatter_count(SetSystem(4, (0,)), 0b1011) == 1
    power = SetSystem(4, tuple(range(16)))
    for sub in range(16):
        assert shatter_count(power, sub) == 2 ** bin(sub).count("1")


@given(set_systems(), st.data())
def test_shatter_count_matches_oracle(s, data):
    sub = data.draw(st.integers(0, (1 << s.ground) - 1))
    sub_set = {i for i in range(s.ground) if sub >> i & 1}
    assert shatter_count(s, sub) == len(traces(as_sets(s), sub_set))


@settings(max_examples=40)
@given(set_systems())
def test_shatter_function_matches_oracle(s):
    nu = shatter_function(s)
    for n in range(s.ground + 1):
        assert nu[n] == brute_nu(s.ground, as_sets(s), n)


def test_sauer_shelah_thresholds():
    s = thresholds(10)
    assert vc_dimension(s) == 1
    assert shatter_function(s) == [n + 1 for n in range(11)]
    assert sauer_shelah_check(s, 1)


def test_sauer_shelah_intervals():
    s = intervals(12)
    assert vc_dimension(s) == 2
    nu = shatter_function(s)
    assert nu == [comb(n, 2) + n + 1 for n in range(13)]
    assert nu == [sauer_shelah_bound(n, 2) for n in range(13)]
    assert sauer_shelah_check(s)


def test_sauer_shelah_powerset():
    s = SetSystem(5, tuple(range(32)))
    assert vc_dimension(s) == 5
    assert shatter_function(s) == [2 ** n for n in range(6)]
    assert sauer_shelah_check(s)


@settings(max_examples=40)
@given(set_systems(max_ground=8))
def test_sauer_shelah_property(s):
    d = vc_dimension(s)
    assert sauer_shelah_check(s, d)
    nu = shatter_function(s)
    assert nu[d] == 2 ** d
    if d < s.ground:
        assert nu[d + 1] < 2 ** (d + 1)


def test_pattern_count_examples():
    assert pattern_count(SetSystem.from_subsets(4, [[0, 1]])) == 2
    assert pattern_count(SetSystem.from_subsets(4, [[0, 1, 2, 3]])) == 1
    covering = SetSystem.from_subsets(6, [[0, 1], [2], [3, 4, 5]])
    assert pattern_count(covering) == 3
    partial = SetSystem.from_subsets(6, [[0, 1], [2], [3]])
    assert pattern_count(partial) == 4


def test_pattern_count_hyperplanes_via_model():
    # point model of 5 generic lines: one test per pattern
    k, tests = HyperplaneSweep(2, seed=0)(4)
    assert len(tests) == 16


# kernel sets


def test_kernel_set_full_only():
    k = cycle_graph(4)
    ks = kernel_set(k, [k.full()], 1)
    assert len(ks) == 1
    assert ks.dims() == [0]
    assert all(kern.ambient_dim == ks.ambient_hp_dim for kern in ks.kernels)


def test_kernel_set_grid_dims():
    g = gen_grid(3)
    ks = kernel_set(g.complex, grid_sweep_tests(g), 1)
    assert set(ks.dims()) == {0, 1, 2, 3, 4}
    assert ks.ambient_hp_dim == 4


def test_kernel_set_pencil():
    inst = gen_pencil_instance(4, seed=0)
    ks = kernel_set(inst.incidence_graph, inst.tests(), 1)
    assert len(ks) >= 7
    assert set(ks.witness.values()) <= set(inst.test_points)


def test_kernel_set_permutation_and_reseed():
    inst = gen_pencil_instance(3, seed=11)
    tests = inst.tests()
    shuffled = tests[:]
    random.Random(0).shuffle(shuffled)
    a = kernel_set(inst.incidence_graph, tests, 1)
    b = kernel_set(inst.incidence_graph, shuffled, 1)
    assert set(a.kernels) == set(b.kernels)
    again = gen_pencil_instance(3, seed=11)
    c = kernel_set(again.incidence_graph, again.tests(), 1)
    assert len(c) == len(a)


def test_nu_sweep_grid():
    got = nu_p_sweep(grid_family, 1, [4, 6, 8])
    for n, c in got:
        assert c >= (n - 1) ** 2 + 1


def test_nu_sweep_hyperplanes():
    for m in (1, 2, 3):
        got = nu_p_sweep(HyperplaneSweep(m, seed=3), 0, range(2, 9))
        assert [c for _, c in got] == [sum(comb(n + 1, i) for i in range(m + 1)) for n in range(2, 9)]


def test_nu_sweep_constant():
    assert nu_p_sweep(constant_family, 1, [1, 3, 5, 7]) == [(1, 1), (3, 1), (5, 1), (7, 1)]


def test_nu_sweep_monotone_and_parallel():
    serial = nu_p_sweep(grid_family, 1, range(2, 7))
    counts = [c for _, c in serial]
    assert counts == sorted(counts)
    assert nu_p_sweep(grid_family, 1, range(2, 7), jobs=2) == serial
    hyper = [c for _, c in nu_p_sweep(HyperplaneSweep(2, seed=1), 0, range(2, 10))]
    assert hyper == sorted(hyper)


def test_nu_sweep_pencil():
    for n, c in nu_p_sweep(PencilSweep(seed=0), 1, [2, 3, 4]):
        assert c >= comb(n, 2) + 1


# slope fitting


def test_slope_power_law():
    fit = fit_vcd_slope([(n, n * n) for n in range(2, 12)])
    assert abs(fit.slope - 2) < 1e-9
    assert abs(fit.r_squared - 1) < 1e-12
    assert fit.window == (2, 11)


def test_slope_constant():
    assert abs(fit_vcd_slope([(n, 7) for n in (3, 5, 9, 20)]).slope) < 1e-12


def test_slope_errors():
    with pytest.raises(ValueError):
        fit_vcd_slope([(2, 4), (3, 9)])
    with pytest.raises(ValueError):
        fit_vcd_slope([(3, 4), (3, 5), (3, 6)])
    with pytest.raises(ValueError):
        fit_vcd_slope([(2, 4), (3, 0), (4, 16)])
    with pytest.raises(ValueError):
        fit_vcd_slope([(4, 4), (3, 9), (5, 16)])


def test_grid_slope_matches_closed_form():
    pts = nu_p_sweep(grid_family, 1, range(4, 9))
    assert pts == [(n, (n - 1) ** 2 + 1) for n in range(4, 9)]
    ns = np.arange(4, 9)
    expected = np.polyfit(np.log(ns), np.log((ns - 1) ** 2 + 1), 1)[0]
    assert abs(fit_vcd_slope(pts).slope - expected) < 1e-9


@pytest.mark.parametrize("m", [1, 2, 3])
def test_hyperplane_slope_window(m):
    # x axis is the family size n+1 (the number of hyperplanes)
    pts = nu_p_sweep(HyperplaneSweep(m, seed=0), 0, range(4, 13))
    fit = fit_vcd_slope([(n + 1, c) for n, c in pts])
    assert m - 0.3 <= fit.slope <= m + 0.05


# higher order


def test_higher_order_single_cut():
    z = [0, 1, 2]
    assert higher_order_pattern_count(z, z, [{(0, 0), (1, 2)}]) == 1


def test_higher_order_rectangles_product():
    z0, z1 = list(range(4)), list(range(5))
    f0 = [set(range(t + 1)) for t in range(4)]  # nonempty prefixes
    f1 = [{1, 3}, {0}, {2, 3, 4}]
    cuts = [{(a, b) for a in a_set for b in b_set} for a_set in f0 for b_set in f1]
    assert higher_order_pattern_count(z0, z1, cuts) == len(f0) * len(f1)


@settings(max_examples=30)
@given(st.lists(st.frozensets(st.integers(0, 5)), min_size=1, max_size=6),
       st.lists(st.frozensets(st.integers(0, 5)), min_size=1, max_size=6))
def test_higher_order_product_property(f0, f1):
    # empty factors collapse to the single empty trace
    z = list(range(6))
    cuts = [{(a, b) for a in x for b in y} for x in f0 for y in f1]
    ne0 = {x for x in f0 if x}
    ne1 = {y for y in f1 if y}
    has_empty = any(not x for x in f0) or any(not y for y in f1)
    assert higher_order_pattern_count(z, z, cuts) == len(ne0) * len(ne1) + has_empty


def test_higher_order_random_vs_oracle():
    rng = random.Random(5)
    z0, z1 = list(range(6)), list(range(6))
    for _ in range(20):
        cuts = []
        for _ in range(rng.randint(1, 15)):
            s, t = rng.randint(-1, 5), rng.randint(-1, 5)
            cuts.append({(a, b) for a in z0 for b in z1 if a <= s or b <= t})
        assert higher_order_pattern_count(z0, z1, cuts) == len(product_traces(z0, z1, cuts))


@pytest.mark.parametrize("n", [1, 2, 3, 6])
def test_quadrant_union_count(n):
    z = list(range(n))
    cuts = quadrant_union_cuts(z, z)
    assert higher_order_pattern_count(z, z, cuts) == len(product_traces(z, z, cuts)) == n * n + 1


# csv


def test_sweep_csv_format():
    text = sweep_csv(sweep_rows("grid", 1, 1, [(4, 10), (5, 17)]))
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[1][:5] == ["grid", "1", "1", "4", "10"]
    assert abs(float(rows[2][5]) - math.log(5)) < 1e-12
    assert text == sweep_csv(sweep_rows("grid", 1, 1, [(4, 10), (5, 17)]))

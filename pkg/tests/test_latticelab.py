"""Reduction, shortest vectors, sampling, and the escape-rate probes."""

import math
from fractions import Fraction as Q

import numpy as np
import pytest

from horolab import exact
from horolab import latticelab as ll
from horolab import flowlab as fl
from horolab.curvejet import CurveSpec


def test_catalog_bases_are_unimodular():
    # rotations enter as exact images of floats, so unimodular up to rounding
    for idx in range(len(ll.CATALOG_BASES)):
        basis = ll.catalog_basis(idx)
        assert abs(abs(float(exact.det(basis.rows))) - 1.0) < 1e-12


def test_lll_transform_is_unimodular():
    basis = ll.random_unimodular_basis(3, seed=11)
    red = ll.lll_reduce(basis)
    assert abs(exact.det(red.transform)) == 1
    regenerated = exact.matmul(red.transform, basis.rows)
    assert regenerated == red.basis.rows


def test_integer_unimodular_systole_is_one():
    # such bases span the full integer lattice, so the systole is pinned
    for seed in range(8):
        basis = ll.random_unimodular_basis(3, seed=seed)
        assert abs(ll.systole(basis) - 1.0) < 1e-9


@pytest.mark.parametrize("dim", [2, 3])
def test_reduction_agrees_with_enumeration(dim):
    for seed in range(60):
        basis = ll.random_real_basis(dim, seed=seed)
        fast = ll.shortest_vector(basis)
        slow = ll.brute_force_shortest(basis)
        assert math.isclose(
            float(fast.norm_sq), float(slow.norm_sq), rel_tol=1e-9
        ), f"dim={dim} seed={seed}"


def test_brute_force_radius_controls_cost():
    basis = ll.catalog_basis(0)
    hit = ll.brute_force_shortest(basis, radius=1.5)
    assert float(hit.norm_sq) == 1.0


def test_brute_force_rejects_oversized_cell():
    basis = ll.random_real_basis(3, seed=2)
    with pytest.raises(ll.LatticeError):
        ll.brute_force_shortest(basis, radius=500.0)


def test_apply_group_stabilizes_integer_lattice():
    # an integer unimodular map permutes Z^2 with itself
    basis = ll.catalog_basis(0)
    g = [[Q(1), Q(1)], [Q(0), Q(1)]]
    moved = ll.apply_group(g, basis)
    assert abs(ll.systole(moved) - 1.0) < 1e-9
    assert abs(exact.det(moved.rows)) == 1


def test_translate_sample_is_deterministic():
    curve = CurveSpec.moment(1)
    sched = fl.FlowSchedule.preset("equal", n=1)
    kw = dict(t=3.0, count=400, observable="systole", seed=123)
    m1 = ll.translate_sample(curve, sched, ll.catalog_basis(0), "s-uniform", **kw)
    m2 = ll.translate_sample(curve, sched, ll.catalog_basis(0), "s-uniform", **kw)
    assert m1.values == m2.values
    assert ll.consistency_distance(m1, m2) == 0.0


def test_consistency_distance_detects_shift():
    curve = CurveSpec.moment(1)
    sched = fl.FlowSchedule.preset("equal", n=1)
    base = ll.translate_sample(curve, sched, ll.catalog_basis(0), "s-uniform",
                               t=1.0, count=400, seed=1)
    far = ll.translate_sample(curve, sched, ll.catalog_basis(0), "s-uniform",
                              t=6.0, count=400, seed=2)
    assert ll.consistency_distance(base, far) > 0.05


def test_ks_null_quantile_shrinks_with_samples():
    q_small = ll.ks_null_quantile(100, 100)
    q_large = ll.ks_null_quantile(10_000, 10_000)
    assert q_large < q_small < 1.0


def test_escape_probe_super_regime():
    table = ll.escape_probe([float(t) for t in range(1, 16)], eta=1.0,
                            rate="super")
    for row in table.rows:
        expected = math.exp(-row.t) * math.sqrt(2.0)
        if row.in_regime:
            assert abs(row.value - expected) <= 1e-12 * expected
            assert row.rel_err <= 1e-12


def test_escape_probe_critical_stays_positive():
    eta = (math.sqrt(5.0) - 1.0) / 2.0
    table = ll.escape_probe([float(t) for t in range(1, 16)], eta=eta,
                            rate="critical")
    assert min(row.value for row in table.rows) > 0.1


def test_make_observable_names():
    name, fn = ll.make_observable("systole")
    assert name == "systole"
    assert fn(2.0) == 2.0
    _, inv = ll.make_observable("invsys:4")
    assert inv(0.1) == 4.0
    with pytest.raises(ValueError):
        ll.make_observable("volume-of-moon")

"""Flow schedules, expansion floors, and the fixed-limit construction."""

import math
from fractions import Fraction as Q

import numpy as np
import pytest

from horolab import flowlab as fl
from horolab.weightlab import basis_vector, build_module, vector


# -- schedules ---------------------------------------------------------------


def test_equal_preset_sums_and_sorts():
    sched = fl.FlowSchedule.preset("equal", n=3)
    for t in (0.5, 2.0, 7.5):
        r = sched.r(t)
        assert abs(float(r.sum()) - 3 * t) <= 1e-12 * max(1.0, 3 * t)
        assert all(a >= b for a, b in zip(r, r[1:]))


def test_linear_preset_parses_fractions():
    sched = fl.FlowSchedule.preset("linear:3/2,1/2", n=2)
    assert sched.slopes == (Q(3, 2), Q(1, 2))
    r = sched.r(4.0)
    assert abs(r[0] - 6.0) < 1e-12 and abs(r[1] - 2.0) < 1e-12


def test_schedule_validation():
    with pytest.raises(fl.ScheduleError):
        fl.FlowSchedule.linear([Q(0), Q(2)])  # increasing
    with pytest.raises(fl.ScheduleError):
        fl.FlowSchedule.preset("linear:3,1", n=2)  # sums to 4, not 2


def test_a_matrix_has_unit_determinant():
    sched = fl.FlowSchedule.preset("linear:2,0", n=2)
    for t in (1.0, 3.0):
        a = sched.a_matrix(t)
        assert abs(np.linalg.det(a) - 1.0) < 1e-9


@pytest.mark.parametrize(
    "name,expected",
    [
        ("equal", (2, True, 3)),
        ("linear:2,0", (1, False, 4)),
        ("linear:3/2,1/2", (2, False, 4)),
    ],
)
def test_classify_triples(name, expected):
    sched = fl.FlowSchedule.preset(name, n=2)
    cls = fl.classify(sched)
    assert (cls.n0, cls.uniform, cls.k) == expected


def test_sublinear_tail_is_not_uniform():
    cls = fl.classify(fl.FlowSchedule.preset("sublinear-tail", n=2))
    assert not cls.uniform


# -- polynomial floor constants ------------------------------------------------


def test_vandermonde_closed_forms():
    assert fl.vandermonde_constant(0, (1, 2)).certified_exact == 1
    assert fl.vandermonde_constant(1, (1, 2)).certified_exact == Q(1, 3)
    assert fl.vandermonde_constant(2, (1, 2)).certified_exact == Q(1, 24)


def test_vandermonde_certified_below_empirical():
    for d in range(7):
        consts = fl.vandermonde_constant(d, (1, 2))
        assert consts.certified_exact <= consts.empirical_exact
        assert consts.certified > 0


def test_vandermonde_floor_on_random_polynomials():
    rng = np.random.default_rng(5)
    grid = np.linspace(1.0, 2.0, 501)
    for d in (1, 3, 5):
        consts = fl.vandermonde_constant(d, (1, 2))
        for _ in range(100):
            coeffs = rng.uniform(-1.0, 1.0, d + 1)
            sup = float(np.abs(np.polyval(coeffs[::-1], grid)).max())
            assert sup >= consts.certified * float(np.abs(coeffs).max())


# -- expansion ---------------------------------------------------------------


def test_expansion_floor_and_growth():
    module = build_module("exterior(1)", 2)
    frame = fl.moment_frame(2)
    sched = fl.FlowSchedule.preset("equal", n=2)
    bound = fl.assemble_expansion_bound(module, frame)
    assert bound.d2 > 0 and bound.c_certified > 0
    v = vector(module, [Q(1, 3), Q(-1), Q(1, 2)])
    values = []
    for t in (2.0, 6.0, 10.0):
        res = fl.expansion_supremum(module, v, sched, frame, t)
        assert not res.rejected
        assert res.value >= bound.d2
        values.append(res.value)
    assert values[0] < values[1] < values[2]


def test_expansion_ladder_rows():
    module = build_module("exterior(2)", 2)
    frame = fl.moment_frame(2)
    sched = fl.FlowSchedule.preset("linear:3/2,1/2", n=2)
    rows = fl.expansion_ladder(module, basis_vector(module, 0), sched, frame,
                               (1.0, 2.0, 4.0))
    assert len(rows) == 3
    assert all(row["M_t"] > 0 for row in rows)
    assert [row["t"] for row in rows] == [1.0, 2.0, 4.0]


def test_xi_coefficients_reconstruct():
    sched = fl.FlowSchedule.preset("linear:2,0", n=2)
    xi = fl.xi_coefficients(sched, 6.0)
    assert xi.sum_error < 1e-9
    assert xi.reconstruction_error < 1e-9


# -- fixed limits -------------------------------------------------------------


def test_qfixed_residual_shrinks_along_ladder():
    frame = fl.moment_frame(2)
    sched = fl.FlowSchedule.preset("equal", n=2)
    residuals = [
        fl.qfixed_limit(frame, sched, 2, eta=2.0, t=t).residual
        for t in (5.0, 10.0, 20.0)
    ]
    assert residuals[0] > residuals[1] > residuals[2]
    assert residuals[-1] < 1e-6


def test_qfixed_closed_form_at_eta_two():
    frame = fl.moment_frame(2)
    res = fl.qfixed_limit(frame, fl.FlowSchedule.preset("equal", n=2), 2,
                          eta=2.0, t=20.0)
    limit = np.asarray(res.limit, dtype=float)
    assert abs(limit[0] - 4.0) < 1e-9
    assert np.abs(limit[1:]).max() < 1e-9


def test_growth_witness_consistency():
    module = build_module("exterior(2)", 2)
    frame = fl.moment_frame(2)
    sched = fl.FlowSchedule.preset("linear:2,0", n=2)
    wit = fl.growth_witness(module, basis_vector(module, 2), sched, frame)
    assert not wit.rejected
    assert wit.verdict in ("bounded", "divergent")
    assert wit.consistent

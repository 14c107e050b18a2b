"""End-to-end gate: one test per shipped acceptance preset.

Each test runs the preset through the harness (cached per session), checks the
exit code, and pins the numeric thresholds the artifacts must meet.  Where an
independent spot check is cheap, it is recomputed here from the library.
"""

import math
from fractions import Fraction as Q

from horolab import dirichlet as di
from horolab import flowlab as fl
from horolab import latticelab as ll


def _check(outcome, check_id):
    assert outcome.exit_code == 0
    assert outcome.summary["all_pass"]
    return outcome.summary["checks"][check_id]


def test_criterion_01_identity_suite(preset_run):
    outcome, elapsed = preset_run("acceptance-01")
    entry = _check(outcome, "acceptance-01")
    assert entry["counts"] == {"passed": 28, "total": 28}
    assert elapsed < 10.0


def test_criterion_02_support_fuzz(preset_run):
    outcome, elapsed = preset_run("acceptance-02")
    entry = _check(outcome, "acceptance-02")
    # 100 seeded draws for each of the nine (rank, module) cells
    assert entry["counts"]["total"] == 900
    assert entry["counts"]["passed"] == 900
    assert elapsed < 300.0


def test_criterion_03_rank_one_inequality(preset_run):
    outcome, _ = preset_run("acceptance-03")
    entry = _check(outcome, "acceptance-03")
    counts = entry["counts"]
    assert counts["passed"] == counts["total"]
    # the equality branch of the characterization must actually be exercised
    assert counts["equalities"] >= 50


def test_criterion_04_polynomial_floors(preset_run):
    outcome, _ = preset_run("acceptance-04")
    entry = _check(outcome, "acceptance-04")
    assert entry["counts"]["violations"] == 0
    assert entry["counts"]["per_degree"] == 1000
    assert entry["metrics"]["formula_error_max"] <= 1e-12
    # independent recomputation of the certified constants
    for d in range(7):
        consts = fl.vandermonde_constant(d, (1, 2))
        formula = 1.0 if d == 0 else 1.0 / (d ** (d + 1) * 3.0)
        assert abs(consts.certified - formula) <= 1e-12


def test_criterion_05_expansion_floors(preset_run):
    outcome, elapsed = preset_run("acceptance-05")
    entry = _check(outcome, "acceptance-05")
    assert entry["metrics"]["floor_margin_min"] >= 0.0
    assert entry["metrics"]["slope_min"] >= -0.01
    assert elapsed < 600.0


def test_criterion_06_bounded_iff_fixed(preset_run):
    outcome, _ = preset_run("acceptance-06")
    entry = _check(outcome, "acceptance-06")
    assert entry["counts"] == {"passed": 10, "total": 10}


def test_criterion_07_fixed_limit_residuals(preset_run):
    outcome, _ = preset_run("acceptance-07")
    entry = _check(outcome, "acceptance-07")
    assert entry["metrics"]["residual_max"] < 1e-6
    assert entry["metrics"]["closed_form_error"] <= 1e-9


def test_criterion_08_equidistribution(preset_run):
    outcome, elapsed = preset_run("acceptance-08")
    entry = _check(outcome, "acceptance-08")
    assert entry["counts"]["samples"] == 10_000
    assert entry["metrics"]["ks_pair"] < 0.05
    assert entry["metrics"]["ks_oracle"] < 0.07
    assert elapsed < 300.0


def test_criterion_09_escape_rates(preset_run):
    outcome, _ = preset_run("acceptance-09")
    entry = _check(outcome, "acceptance-09")
    assert entry["metrics"]["closed_form_rel_err"] <= 1e-12
    assert entry["metrics"]["critical_floor"] > 0.1
    # spot check the closed form straight from the library
    table = ll.escape_probe([5.0, 10.0], eta=1.0, rate="super")
    for row in table.rows:
        if row.in_regime:
            want = math.exp(-row.t) * math.sqrt(2.0)
            assert abs(row.value - want) <= 1e-12 * want


def test_criterion_10_witness_suite(preset_run):
    outcome, elapsed = preset_run("acceptance-10")
    entry = _check(outcome, "acceptance-10")
    assert entry["counts"]["equivalence"] == 500
    assert entry["counts"]["completeness"] == 500
    assert entry["counts"]["monotonicity"] == 200
    assert entry["metrics"]["all_improvable_fraction"] < 0.5
    assert elapsed < 600.0
    # the exact exponent values behind the "exact exponents ok" detail
    assert di.rbar1([(2**k, 2**k) for k in range(1, 21)]).value == Q(1, 2)
    assert di.rbar1([(4**k, 2**k) for k in range(1, 21)]).value == Q(2, 3)

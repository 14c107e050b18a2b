"""Support classification, fixed-subgroup tests, and the rank one inequality."""

from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horolab.weightlab import (
    basis_vector,
    build_module,
    estimate_D1,
    fixed_check,
    h_principal,
    s_sets,
    sl2_maxweight_check,
    vector,
)


def test_s_sets_rejects_bad_input():
    mod = build_module("standard", 2)
    with pytest.raises(ValueError):
        s_sets(basis_vector(mod, 0), [Q(1), Q(0)])  # zero entry
    with pytest.raises(ValueError):
        s_sets(vector(mod, [Q(0), Q(0), Q(0)]), [Q(1), Q(1)])
    # mixed-level vectors are not eigenvectors of the principal element
    with pytest.raises(ValueError):
        s_sets(vector(mod, [Q(1), Q(1), Q(0)]), [Q(1), Q(1)])


@pytest.mark.parametrize("kind", ["standard", "exterior(2)", "adjoint"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_s_sets_on_basis_eigenvectors(kind, n):
    mod = build_module(kind, n)
    x = [Q(1)] * n
    for idx in range(mod.dim):
        rep = s_sets(basis_vector(mod, idx), x)
        assert rep.nonneg_levels
        assert rep.s_n_nonempty and rep.s_all_nonempty
        assert rep.consistent


def test_fixed_check_last_column_stabilizer():
    mod = build_module("standard", 2)
    e_last = basis_vector(mod, 2)
    assert fixed_check(e_last, "Q")
    assert not fixed_check(e_last, "G")
    assert not fixed_check(basis_vector(mod, 0), "Q")


def test_fixed_check_sl2_slot():
    mod = build_module("exterior(2)", 2)
    # the wedge of the two non-distinguished directions is killed by slot 1
    fixed = [idx for idx in range(mod.dim)
             if fixed_check(basis_vector(mod, idx), ("sl2", 2))]
    assert fixed  # at least one basis wedge avoids slot 2 entirely


def test_estimate_d1_positive_and_small():
    mod = build_module("standard", 2)
    est = estimate_D1(mod, Q(1), [Q(1), Q(1)])
    assert 0 < est.value <= 1
    assert est.grid_points > 0


small_q = st.fractions(min_value=-5, max_value=5, max_denominator=4)
nonzero_q = small_q.filter(lambda q: q != 0)


@given(
    coords=st.lists(small_q, min_size=3, max_size=3),
    r=nonzero_q,
    slot=st.integers(min_value=1, max_value=2),
)
@settings(max_examples=120, deadline=None)
def test_sl2_inequality_always_holds(coords, r, slot):
    mod = build_module("standard", 2)
    if all(c == 0 for c in coords):
        coords = [Q(1)] + list(coords)[1:]
    rep = sl2_maxweight_check(slot, r, vector(mod, coords))
    assert rep.inequality_ok
    assert rep.characterization_ok


def test_sl2_equality_mixed_vector():
    # both weight lines populated; equality forces the exact recovery form
    mod = build_module("standard", 1)
    rep = sl2_maxweight_check(1, Q(-3, 2), vector(mod, [Q(7, 2), Q(7, 3)]))
    assert rep.equality
    assert rep.recovery_ok and rep.rotated_top_ok
    assert rep.ok


def test_sl2_equality_needs_matching_ratio():
    # same vector, different r: the translate keeps its top level
    mod = build_module("standard", 1)
    rep = sl2_maxweight_check(1, Q(1, 2), vector(mod, [Q(7, 2), Q(7, 3)]))
    assert not rep.equality
    assert rep.lam_max_w + rep.lam_max_v > 0
    assert rep.characterization_ok


def test_sl2_low_eigenvector_is_always_equality():
    mod = build_module("standard", 2)
    v = basis_vector(mod, 1)  # pure weight line below the top
    for r in (Q(1), Q(-2), Q(5, 3)):
        rep = sl2_maxweight_check(1, r, v)
        assert rep.equality and rep.ok
        assert rep.eigenvector


def test_sl2_rejects_degenerate_input():
    mod = build_module("standard", 2)
    with pytest.raises(ValueError):
        sl2_maxweight_check(1, 0, basis_vector(mod, 0))
    with pytest.raises(ValueError):
        sl2_maxweight_check(1, Q(1), vector(mod, [Q(0)] * 3))

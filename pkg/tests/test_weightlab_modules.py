"""Representation bookkeeping: dimensions, weights, and the two actions."""

from fractions import Fraction as Q
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horolab import exact
from horolab.weightlab import (
    act,
    act_algebra,
    basis_vector,
    build_module,
    h_principal,
    to_jsonable,
    u_elem,
    vector,
    vector_from_json,
    weight_support,
)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dimensions(n):
    assert build_module("standard", n).dim == n + 1
    assert build_module("adjoint", n).dim == (n + 1) ** 2 - 1
    for k in range(1, n + 2):
        assert build_module(f"exterior({k})", n).dim == comb(n + 1, k)


def test_adjoint_weights_sum_to_zero():
    mod = build_module("adjoint", 2)
    hp = h_principal(2)
    total = sum(w.evaluate(hp) for w in mod.weights)
    assert total == 0


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        build_module("spinor", 2)


small_q = st.fractions(
    min_value=-4, max_value=4, max_denominator=3
)


@given(c1=small_q, c2=small_q, coords=st.lists(small_q, min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_action_is_multiplicative(c1, c2, coords):
    mod = build_module("standard", 2)
    v = vector(mod, coords)
    g = u_elem(2, 0, 1, c1)
    h = u_elem(2, 1, 2, c2)
    lhs = act(g, act(h, v))
    rhs = act(exact.matmul(g, h), v)
    assert (lhs - rhs).is_zero()


@given(coords=st.lists(small_q, min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_algebra_action_respects_brackets(coords):
    mod = build_module("exterior(2)", 2)
    v = vector(mod, coords)
    x = exact.elementary(3, 0, 1)
    y = exact.elementary(3, 1, 0)
    lhs = act_algebra(exact.commutator(x, y), v)
    rhs = act_algebra(x, act_algebra(y, v)) - act_algebra(y, act_algebra(x, v))
    assert (lhs - rhs).is_zero()


def test_weight_support_of_basis_vector_is_singleton():
    mod = build_module("adjoint", 2)
    for idx in range(mod.dim):
        assert len(weight_support(basis_vector(mod, idx))) == 1


def test_vector_json_roundtrip():
    mod = build_module("exterior(2)", 3)
    v = vector(mod, [Q(1, 3), Q(0), Q(-2), Q(5, 7), Q(0), Q(1)])
    back = vector_from_json(to_jsonable(v))
    assert back.module.kind == mod.kind and back.module.n == mod.n
    assert (back - v).is_zero()

"""Witness searches for simultaneous approximation, both forms.

Every found witness is re-verified here in exact rational arithmetic against
the float inputs taken at their exact binary values, so a passing suite means
the searches never report a false positive.
"""

import math
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horolab import dirichlet as di


def _primal_holds(query, witness, slack=Q(1, 10**12)):
    q_vec, p = witness
    xi = [Q(x) for x in query.xi]
    err = abs(sum(x * q for x, q in zip(xi, q_vec)) - p)
    bound = Q(query.mu) / query.box_product
    return err <= bound * (1 + slack) + slack


def _dual_holds(query, witness, slack=Q(1, 10**12)):
    q, p_vec = witness
    for x, p, n_i in zip(query.xi, p_vec, query.bounds):
        if abs(Q(x) * q - p) > Q(query.mu) / n_i * (1 + slack) + slack:
            return False
    return True


# -- primal form --------------------------------------------------------------


def test_rational_point_hits_exactly():
    res = di.di_witness(di.DIQuery("primal", (1 / 3,), (3,), 0.5))
    assert res.found
    assert res.witness == ((3,), 1)
    # the float 1/3 sits half an ulp off the rational, nothing more
    assert res.residual < 1e-15


def test_irrational_point_two_candidates():
    xi = math.sqrt(2) - 1
    res = di.di_witness(di.DIQuery("primal", (xi,), (2,), 0.9))
    assert res.found
    assert res.witness == ((2,), 1)
    assert abs(2 * xi - 1) <= 0.45


def test_irrational_point_no_witness_at_tight_mu():
    xi = math.sqrt(2) - 1
    res = di.di_witness(di.DIQuery("primal", (xi,), (1,), 0.4))
    assert not res.found
    assert res.witness is None


def test_witness_ties_resolve_to_nonnegative_q():
    res = di.di_witness(di.DIQuery("primal", (0.5,), (2,), 1.0))
    assert res.found
    assert res.witness == ((2,), 1)


def test_search_volume_counts_the_grid():
    res = di.di_witness(di.DIQuery("primal", (0.3, 0.7), (2, 3), 0.9))
    assert res.search_volume == 5 * 7 - 1


def test_budget_guard():
    with pytest.raises(di.SearchBudgetError):
        di.di_witness(di.DIQuery("primal", (0.3, 0.4), (4000, 4000), 0.5))


def test_query_validation():
    with pytest.raises(ValueError):
        di.DIQuery("sideways", (0.5,), (2,), 0.5)
    with pytest.raises(ValueError):
        di.DIQuery("primal", (0.5,), (0,), 0.5)
    with pytest.raises(ValueError):
        di.DIQuery("primal", (0.5,), (2,), 1.5)


@given(
    xi=st.lists(st.floats(-2.0, 2.0, allow_nan=False), min_size=1, max_size=2),
    bounds=st.lists(st.integers(1, 6), min_size=1, max_size=2),
    mu=st.sampled_from([0.2, 0.5, 0.9]),
)
@settings(max_examples=80, deadline=None)
def test_found_primal_witnesses_verify_exactly(xi, bounds, mu):
    k = min(len(xi), len(bounds))
    query = di.DIQuery("primal", tuple(xi[:k]), tuple(bounds[:k]), mu)
    res = di.di_witness(query)
    if res.found:
        assert _primal_holds(query, res.witness)
        assert res.residual <= 1


# -- dual form ----------------------------------------------------------------


def test_dual_common_denominator():
    res = di.di_dual_witness(di.DIQuery("dual", (0.5, 1 / 3), (2, 3), 0.5))
    assert res.found
    assert res.witness == (6, (3, 2))


def test_dual_minimal_q_is_returned():
    xi = (math.sqrt(2) - 1, math.sqrt(3) - 1)
    query = di.DIQuery("dual", xi, (2, 2), 0.9)
    res = di.di_dual_witness(query)
    assert res.found
    q_found, _ = res.witness
    assert 1 <= q_found <= 4
    assert _dual_holds(query, res.witness)
    # no strictly smaller positive q admits a witness (margins are wide here)
    for q in range(1, q_found):
        worst = max(abs(x * q - round(x * q)) - 0.9 / n for x, n in
                    zip(xi, query.bounds))
        assert worst > 1e-6


def test_dual_tiny_mu_finds_nothing():
    res = di.di_dual_witness(
        di.DIQuery("dual", (math.sqrt(2) - 1, math.sqrt(3) - 1), (2, 2), 1e-9)
    )
    assert not res.found


# -- lattice reformulation ----------------------------------------------------


def test_dani_lattice_shape():
    query = di.DIQuery("primal", (0.4,), (3,), 1.0)
    basis, widths = di.dani_lattice(query)
    assert len(basis.rows) == 2
    assert basis.rows[0] == (Q(-1), Q(0))
    assert widths[0] == pytest.approx(1 / 3)
    assert widths[1] == 3


def test_box_search_matches_direct_witness():
    query = di.DIQuery("primal", (0.4,), (3,), 1.0)
    direct = di.di_witness(query)
    boxed = di.box_point_search(query)
    assert direct.found and boxed.found
    point = di.witness_point(query, boxed.witness)
    assert abs(point[0]) <= 1 / 3 + 1e-12
    assert abs(point[1]) <= 3


def test_zero_vector_query_maps_to_integer_lattice():
    query = di.DIQuery("primal", (0.0, 0.0), (2, 2), 0.7)
    res = di.box_point_search(query)
    assert res.found
    assert res.witness[1] == 0  # p


def test_forms_agree_on_random_queries():
    import numpy as np

    rng = np.random.default_rng(99)
    for _ in range(60):
        n = int(rng.integers(1, 4))
        query = di.DIQuery(
            "primal",
            tuple(float(x) for x in rng.uniform(-2, 2, n)),
            tuple(int(b) for b in rng.integers(1, 8, n)),
            float(rng.choice([0.3, 0.6, 0.9])),
        )
        assert di.di_witness(query).found == di.box_point_search(query).found


def test_mu_monotonicity():
    import numpy as np

    rng = np.random.default_rng(7)
    for _ in range(40):
        xi = tuple(float(x) for x in rng.uniform(-2, 2, 2))
        bounds = tuple(int(b) for b in rng.integers(1, 7, 2))
        flags = [
            di.di_witness(di.DIQuery("primal", xi, bounds, mu)).found
            for mu in (0.2, 0.4, 0.6, 0.8, 1.0)
        ]
        assert all(b or not a for a, b in zip(flags, flags[1:]))
        assert flags[-1]  # mu = 1 always admits a witness


# -- exponent statistics -------------------------------------------------------


def test_rbar1_exact_values():
    half = di.rbar1([(2**k, 2**k) for k in range(1, 21)])
    assert half.exact and half.value == Q(1, 2)
    two_thirds = di.rbar1([(4**k, 2**k) for k in range(1, 21)])
    assert two_thirds.exact and two_thirds.value == Q(2, 3)


def test_rbar1_trivial_direction():
    res = di.rbar1([(2**k, 1) for k in range(1, 11)])
    assert res.value == 1


def test_rbar1_skips_degenerate_entries():
    res = di.rbar1([(1, 1), (4, 4), (8, 8)])
    assert res.skipped == (0,)  # index of the degenerate entry
    assert res.notices
    with pytest.raises(ValueError):
        di.rbar1([(1, 1)])


def test_rbar1_range_invariant():
    import numpy as np

    rng = np.random.default_rng(3)
    for _ in range(25):
        n = int(rng.integers(1, 4))
        seq = [tuple(int(b) for b in rng.integers(1, 50, n)) for _ in range(12)]
        if all(math.prod(t) == 1 for t in seq):
            continue
        res = di.rbar1(seq)
        assert Q(1, n) <= res.value <= 1


# -- curve scans ---------------------------------------------------------------


def test_curve_scan_small_table():
    curve = di.CurveSpec.moment(2)
    table = di.curve_scan(curve, (0.0, 1.0), ((2, 2), (4, 4)), 0.3, 12)
    assert len(table.s_values) == 12
    assert len(table.cells) == 12 * 2 * 2  # two forms per (s, N)
    assert len(table.prefix_fractions) == 2
    assert 0.0 <= table.all_improvable_fraction <= 1.0
    # every grid point k/11 is a small-denominator rational, so all are hinted
    assert table.rational_hints == tuple(range(12))


def test_curve_scan_mu_one_everything_found():
    curve = di.CurveSpec.moment(2)
    table = di.curve_scan(curve, (0.1, 0.9), ((2, 2), (2, 4)), 1.0, 6)
    assert all(cell.found for cell in table.cells if not cell.skipped)
    assert table.all_improvable_fraction == 1.0

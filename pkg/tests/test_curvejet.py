"""Jets, ordered-regular frames, and the curve regularity scan."""

import math
from fractions import Fraction as Q

import numpy as np
import pytest

from horolab.curvejet import (
    CurveSpec,
    NotOrderedRegular,
    jet,
    jet_exact,
    ordered_regular_frame,
    regularity_scan,
    taylor_frame_remainder,
)


def test_moment_frame_at_zero_is_identity():
    curve = CurveSpec.moment(2)
    frame = ordered_regular_frame(curve, 0)
    assert frame.exact
    assert frame.kappa == (Q(1), Q(1))
    assert frame.b_matrix == ((Q(1), Q(0)), (Q(0), Q(1)))


def test_polynomial_frame_tracks_taylor_coefficients():
    # second row of the frame carries phi''/2!, so halving the quadratic
    # halves the second pivot
    curve = CurveSpec.polynomial([[0, 1], [0, 0, Q(1, 2)]])
    frame = ordered_regular_frame(curve, 0)
    assert frame.kappa[1] == Q(1, 2)


def test_jet_matches_hand_derivatives():
    # rows: s, s^2, 1 + 2 s^3
    curve = CurveSpec.polynomial([[0, 1], [0, 0, 1], [1, 0, 0, 2]])
    res = jet(curve, 0.75, 3)
    assert res.exact
    expected = [(1.0, 1.5, 3.375), (0.0, 2.0, 9.0), (0.0, 0.0, 12.0)]
    for got, want in zip(res.derivatives, expected):
        assert np.abs(np.asarray(got) - np.asarray(want)).max() < 1e-12
    refs = jet_exact(curve, Q(3, 4), 3)
    assert refs[2][2] == 12


def test_degenerate_curve_rejected():
    # two identical coordinates: the derivative rows are linearly dependent
    curve = CurveSpec.polynomial([[0, 1], [0, 1]])
    with pytest.raises(NotOrderedRegular):
        ordered_regular_frame(curve, Q(1, 2))


def test_regularity_scan_flags_pivot_collapse():
    # (s^2, s^3) loses its first derivative at s = 0
    curve = CurveSpec.polynomial([[0, 0, 1], [0, 0, 0, 1]])
    scan = regularity_scan(curve, (-0.5, 0.5), 41)
    assert scan.checked == 41
    assert scan.failures
    bad = min(abs(s) for s, _ in scan.failures)
    assert bad < 0.05


def test_regularity_scan_clean_on_trig():
    curve = CurveSpec.preset("trig")
    scan = regularity_scan(curve, (0.1, 3.0), 60)
    assert not scan.failures
    assert not scan.clusters


def test_taylor_remainder_shrinks():
    curve = CurveSpec.preset("trig")
    rems = [
        float(np.abs(taylor_frame_remainder(curve, 1.0, 2, h)).max())
        for h in (1e-1, 1e-2, 1e-3)
    ]
    assert rems[0] > rems[1] > rems[2]
    assert rems[2] < 1e-6


def test_frame_inverse_consistency():
    curve = CurveSpec.preset("trig")
    frame = ordered_regular_frame(curve, 0.7)
    b = np.asarray(frame.b_matrix, dtype=float)
    b_inv = np.asarray(frame.b_inverse, dtype=float)
    assert np.abs(b @ b_inv - np.eye(2)).max() < 1e-10


def test_moment_preset_needs_n():
    with pytest.raises(ValueError):
        CurveSpec.preset("moment")
    with pytest.raises(ValueError):
        CurveSpec.preset("helix")

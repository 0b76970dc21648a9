import numpy as np
import pytest

from helpers import TANGLE_CASES, mesh, pipeline
from oracles import brute_double_tangents, winding_number

from gradspine.tangle import point_inside, segment_interior


@pytest.mark.parametrize("kind,params,d", TANGLE_CASES)
def test_matches_brute_force(kind, params, d):
    s, t = pipeline(kind, params, d)
    assert t.polarity_multiset() == brute_double_tangents(s.mesh, s.direction, s.folds)


@pytest.mark.parametrize("kind,params,d", TANGLE_CASES[:3])
def test_trajectory_geometry(kind, params, d):
    s, t = pipeline(kind, params, d)
    v = s.direction
    assert t.gc >= 2
    for tr in t.trajectories:
        hi, lo = np.array(tr.upper_point), np.array(tr.lower_point)
        gap = hi - lo
        # vertical: the chord is parallel to v and points along it
        assert np.linalg.norm(gap - np.dot(gap, v) * v) < 1e-9
        assert np.dot(gap, v) > 0
        assert abs(winding_number(s.mesh, 0.5 * (hi + lo)) - 1) < 1e-6
        for loop, seg, frac in (tr.upper, tr.lower):
            assert s.folds[loop].plus[seg]
            assert 0 <= frac <= 1


def test_output_is_sorted_and_serializable():
    s, t = pipeline(*TANGLE_CASES[0])
    keys = [(tr.upper, tr.lower) for tr in t.trajectories]
    assert keys == sorted(keys)
    d = t.as_dict()
    assert d["gc"] == t.gc
    assert d["gc_pol"]["plus"] + d["gc_pol"]["minus"] == t.gc


def test_convex_has_no_candidates():
    _, t = pipeline("icosphere", {}, (0.2, 0.3, 1))
    assert t.gc == 0 and t.candidates == 0


@pytest.mark.parametrize("point,inside", [((0, 0, 0), True), ((0.5, 0.1, 0.2), True),
                                          ((1.5, 0, 0), False), ((0, 0, -1.2), False)])
def test_point_inside_agrees_with_winding(point, inside):
    m = mesh("icosphere")
    assert point_inside(m, point) == inside
    assert round(winding_number(m, point)) == int(inside)


def test_segment_interior_rejects_exits():
    m = mesh("peanut", {})
    v = np.array([0.0, 0.0, 1.0])
    assert segment_interior(m, (0, 0, -0.3), (0, 0, 0.3), v)
    assert not segment_interior(m, (0, 0, -0.3), (0, 0, 3.0), v)

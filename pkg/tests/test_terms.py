import numpy as np
import pytest

from humanoid_suite.config import load_common, load_task
from humanoid_suite.rewards.terms import effort_term, posture_terms, still_terms
from humanoid_suite.state import WorldState


def make_state(z_head=1.8, z_proj=1.0, v=(0.0, 0.0)):
    return WorldState(
        joint_pos=np.zeros(4), joint_vel=np.zeros(4),
        body_pose={"head": np.array([0.0, 0.0, z_head, 1.0, 0.0, 0.0, 0.0]),
                   "pelvis": np.array([0.0, 0.0, 0.98, 1.0, 0.0, 0.0, 0.0])},
        pelvis_frame_vel=v, z_proj=z_proj)


def test_effort_zero_action_is_exactly_one():
    assert effort_term(np.zeros(61)) == 1.0


def test_effort_limit_is_point_eight():
    # huge commands drive every per-joint term to ~0, leaving the 0.8 floor
    assert effort_term(np.full(61, 1e6)) == pytest.approx(0.8, abs=1e-12)


def test_effort_fixed_vector_frozen_value():
    # independent scalar evaluation of 0.2*(4 + mean tol(u, (0,0), 10))
    assert effort_term(np.array([0.5, -0.3, 1.0, 0.0])) == pytest.approx(
        0.9984713557055648, abs=1e-12)


def test_effort_range_under_fuzz(rng):
    for _ in range(200):
        u = rng.uniform(-8, 8, 61)
        e = effort_term(u)
        assert 0.8 <= e <= 1.0


def test_effort_empty_action_rejected():
    with pytest.raises(ValueError, match="empty"):
        effort_term(np.array([]))


def test_posture_all_inside_bounds():
    common = load_common()
    p = posture_terms(make_state(), np.zeros(61), common)
    for name in ("height", "upright", "stand", "effort", "stable", "still"):
        assert p[name] == 1.0


def test_posture_horizontal_robot():
    # z_proj = 0 sits 0.9 below the bound with margin 1.9
    common = load_common()
    p = posture_terms(make_state(z_proj=0.0), np.zeros(61), common)
    assert p["upright"] == pytest.approx(0.5965176093775065, abs=1e-12)
    assert p["stand"] <= p["upright"]


def test_posture_missing_body_is_named():
    common = load_common()
    state = make_state()
    del state.body_pose["head"]
    with pytest.raises(KeyError, match="head"):
        posture_terms(state, np.zeros(61), common)


def test_still_at_two_meters_per_second():
    common = load_common()
    sx, sy = still_terms(2.0, 0.0, common)
    assert sx == pytest.approx(0.1, abs=1e-12)
    assert sy == 1.0
    assert 0.5 * (sx + sy) == pytest.approx(0.55, abs=1e-12)


def test_task_common_defaults_match_shared_config():
    task = load_task("walk")
    assert task.common["height"]["bounds"] == [1.65, float("inf")]
    assert task.common["height"]["margin"] == 0.4125
    assert task.common["upright"]["bounds"] == [0.9, float("inf")]
    assert task.common["upright"]["margin"] == 1.9

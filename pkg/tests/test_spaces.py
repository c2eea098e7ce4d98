import numpy as np
import pytest

from humanoid_suite.config import load_robot, load_task
from humanoid_suite.spaces import (ActionMap, MissingSegmentError, assemble_observation,
                                   build_layout)
from humanoid_suite.synth import SynthEpisode, random_state

FULL = load_robot("full")
NO_HANDS = load_robot("no_hands")


def test_observation_base_dimensions():
    assert build_layout(load_task("walk"), "full").total_dim == 151
    assert build_layout(load_task("walk"), "reduced").total_dim == 49
    assert build_layout(load_task("walk", robot="no_hands"), "no_hands").total_dim == 49
    assert build_layout(load_task("walk"), "blocked").total_dim == 151


def test_full_base_split_is_49_plus_two_51():
    # body block: (26-2) qpos + 25 qvel; each hand: 26 qpos + 25 qvel
    body = (7 + 19 - 2) + (6 + 19)
    hand = (4 + 22) + (3 + 22)
    assert body == 49 and hand == 51
    assert body + 2 * hand == build_layout(load_task("walk"), "full").total_dim


def test_reach_layout_is_157():
    assert build_layout(load_task("reach"), "full").total_dim == 157


def test_action_dims():
    assert ActionMap(FULL, "full").dim == 61
    assert ActionMap(FULL, "blocked").dim == 19
    assert ActionMap(NO_HANDS, "no_hands").dim == 19


def test_every_task_layout_matches_segment_sum(all_task_ids):
    for tid in all_task_ids:
        task = load_task(tid)
        layout = build_layout(task, "full")
        declared = 151 + sum(s["len"] for s in task.observation_segments)
        assert layout.total_dim == declared, tid
        state = random_state(task, np.random.default_rng(5))
        episode = SynthEpisode(subtask_order=tuple(range(5)))
        obs = assemble_observation(state, task, layout, episode)
        assert obs.shape == (layout.total_dim,), tid


def test_observation_is_deterministic():
    task = load_task("push")
    layout = build_layout(task, "full")
    state = random_state(task, np.random.default_rng(0))
    a = assemble_observation(state, task, layout)
    b = assemble_observation(state, task, layout)
    assert np.array_equal(a, b)


def test_missing_segment_source_named_in_error():
    task = load_task("push")
    layout = build_layout(task, "full")
    state = random_state(task, np.random.default_rng(0))
    del state.site_pos["box_destination"]
    with pytest.raises(MissingSegmentError, match="box_destination"):
        assemble_observation(state, task, layout)


def test_bookshelf_needs_episode_for_index_segment():
    task = load_task("bookshelf_simple")
    layout = build_layout(task, "full")
    state = random_state(task, np.random.default_rng(0))
    with pytest.raises(MissingSegmentError, match="episode"):
        assemble_observation(state, task, layout, episode=None)


def test_denormalize_zero_hits_midpoints():
    amap = ActionMap(FULL, "full")
    targets = amap.denormalize(np.zeros(61))
    mids = np.array([FULL.joint_by_name(n).mid for n in FULL.actuated_names])
    assert np.allclose(targets, mids, atol=1e-15)


def test_denormalize_one_hits_upper_limits():
    amap = ActionMap(FULL, "full")
    targets = amap.denormalize(np.ones(61))
    uppers = np.array([FULL.joint_by_name(n).upper for n in FULL.actuated_names])
    assert np.allclose(targets, uppers, atol=1e-12)


def test_round_trip_normalize_denormalize(rng):
    amap = ActionMap(FULL, "full")
    for _ in range(200):
        a = rng.uniform(-1, 1, 61)
        assert np.allclose(amap.normalize(amap.denormalize(a)), a, atol=1e-12)


def test_round_trip_bulk_10k(rng):
    amap = ActionMap(FULL, "full")
    worst = 0.0
    for _ in range(10_000 // 100):
        a = rng.uniform(-1, 1, (100, 61))
        for row in a:
            back = amap.normalize(amap.denormalize(row))
            worst = max(worst, float(np.max(np.abs(back - row))))
    assert worst < 1e-12


def test_out_of_range_actions_clamp_with_counter():
    amap = ActionMap(FULL, "full")
    before = amap.clamp_count
    targets = amap.denormalize(np.full(61, 2.0))
    uppers = np.array([FULL.joint_by_name(n).upper for n in FULL.actuated_names])
    assert np.allclose(targets, uppers, atol=1e-12)
    assert amap.clamp_count == before + 61


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError, match="dim 61"):
        ActionMap(FULL, "full").denormalize(np.zeros(19))


def test_blocked_hand_targets_constant_across_actions(rng):
    amap = ActionMap(FULL, "blocked")
    hand_targets = set()
    for _ in range(50):
        targets = amap.denormalize(rng.uniform(-1, 1, 19))
        hand_targets.add(tuple(np.round(targets[19:], 15)))
    assert len(hand_targets) == 1    # 42 hand entries never move
    assert len(next(iter(hand_targets))) == 42


def test_blocked_expand_pads_zeros():
    amap = ActionMap(FULL, "blocked")
    u = amap.expand(np.full(19, 0.5))
    assert u.shape == (61,)
    assert np.all(u[19:] == 0.0)


def test_torque_mode_behind_same_interface():
    amap = ActionMap(FULL, "full", mode="torque")
    t = amap.denormalize(np.ones(61))
    assert t[0] == 150.0 and t[-1] == 5.0
    assert np.allclose(amap.normalize(t), np.ones(61))


def test_layout_manifest_contents():
    layout = build_layout(load_task("reach"), "full")
    manifest = layout.to_manifest()
    assert manifest["total_dim"] == 157
    names = [s["name"] for s in manifest["segments"]]
    assert names[0] == "robot_base"
    offsets = [s["offset"] for s in manifest["segments"]]
    assert offsets == sorted(offsets)


def test_env_blocked_variant_runs():
    from humanoid_suite.episode.worker import TaskEnv
    env = TaskEnv("walk", variant="blocked")
    obs = env.reset(0)
    assert obs.shape == (151,) and env.action_dim == 19
    obs2, breakdown, _, _ = env.step(np.full(19, 0.3))
    assert obs2.shape == (151,)
    assert 0.8 <= breakdown.terms["effort"] <= 1.0

"""Kernel-vs-reference sweeps on synthetic states (fast version).

The full 10,000-state-per-task sweep runs in the acceptance suite; this one
keeps the same machinery hot during development.
"""

import numpy as np
import pytest

from humanoid_suite import oracle, synth
from humanoid_suite.config import load_task
from humanoid_suite.rewards.tasks import compute_reward

N_STATES = 500

# dense rewards built as convex combinations of unit-range terms stay within
# the combination's reachable interval
CONVEX_TASKS = {
    "door": 1.0, "crawl": 1.0, "spoon": 1.0, "pole": 1.0, "powerlift": 1.0,
    "room": 1.0, "window": 1.0, "cube": None, "insert_small": 1.0,
    "insert_normal": 1.0, "bookshelf_simple": 1.0, "bookshelf_hard": 1.0,
    "maze": 1.0, "cabinet": 1.0, "basketball": 1.0,
}


def test_kernel_matches_reference_on_every_task(all_task_ids):
    worst = {}
    for tid in all_task_ids:
        task = load_task(tid)
        rng = np.random.default_rng(99)
        m = 0.0
        for _ in range(N_STATES):
            state = synth.random_state(task, rng)
            action = synth.random_action(task, rng)
            episode = synth.random_episode(task, rng)
            kernel = compute_reward(task, state, action, episode).dense
            reference = oracle.oracle_dense(task, state, action, episode)
            m = max(m, abs(kernel - reference))
        worst[tid] = m
        assert m < 1e-9, f"{tid}: kernel deviates from reference by {m}"
    assert max(worst.values()) < 1e-9


@pytest.mark.parametrize("tid", sorted(CONVEX_TASKS))
def test_convex_combination_range(tid):
    task = load_task(tid)
    upper = CONVEX_TASKS[tid]
    rng = np.random.default_rng(7)
    for _ in range(300):
        state = synth.random_state(task, rng)
        # cube's verbatim orientation term is unbounded above by design
        episode = synth.random_episode(task, rng)
        out = compute_reward(task, state, synth.random_action(task, rng), episode)
        assert out.dense >= -1e-12, f"{tid} produced negative convex reward"
        if upper is not None:
            assert out.dense <= upper + 1e-12, f"{tid} exceeded its combination max"


def test_compute_reward_is_pure(all_task_ids):
    for tid in all_task_ids[::5]:
        task = load_task(tid)
        rng = np.random.default_rng(3)
        state = synth.random_state(task, rng)
        action = synth.random_action(task, rng)
        episode = synth.random_episode(task, rng)
        first = compute_reward(task, state, action, episode)
        for _ in range(3):
            again = compute_reward(task, state, action, episode)
            assert again.dense == first.dense  # bit-identical
            assert again.terms == first.terms


def test_reference_termination_matches_machine(all_task_ids):
    from humanoid_suite.episode.machine import check_termination
    for tid in all_task_ids:
        task = load_task(tid)
        rng = np.random.default_rng(11)
        for _ in range(200):
            state = synth.random_state(task, rng)
            episode = synth.random_episode(task, rng)
            status = check_termination(task, state, episode)
            ref_done, ref_reason = oracle.oracle_terminated(task, state, episode)
            assert status.terminated == ref_done, (tid, state.step_index)
            assert status.reason == ref_reason, (tid, status.reason, ref_reason)

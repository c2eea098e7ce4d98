"""Single-environment composition of backend, episode machine, and rewards."""

import numpy as np

from ..config import TaskSpec, load_task
from ..rewards.tasks import compute_reward
from ..spaces import ActionMap, build_layout, assemble_observation
from . import machine


def make_backend(task: TaskSpec, backend: str = "scripted",
                 collision_profile: str = "full", assets_dir=None):
    if backend == "scripted":
        from ..backends.scripted import ScriptedBackend
        return ScriptedBackend(task, collision_profile)
    if backend == "engine":
        from ..backends.engine import EngineBackend
        return EngineBackend(task, collision_profile, assets_dir=assets_dir)
    raise ValueError(f"unknown backend {backend!r}")


class TaskEnv:
    """Step/reset environment around one backend instance.

    Owns exactly one episode at a time; no auto-reset (the serving layer
    layers that on).
    """

    def __init__(self, task, backend: str = "scripted", variant: str = "full",
                 collision_profile: str = "full", assets_dir=None,
                 control_mode: str = "position", respawn_targets: bool = None):
        if isinstance(task, str):
            robot = "no_hands" if variant == "no_hands" else None
            task = load_task(task, robot=robot, respawn_targets=respawn_targets)
        self.task = task
        self.variant = variant
        self.backend = make_backend(task, backend, collision_profile, assets_dir)
        self.layout = build_layout(task, variant)
        self.action_map = ActionMap(task.robot, variant, control_mode)
        self.substeps = int(task.common["control"]["substeps"])
        self.episode = None
        self._last_state = None

    @property
    def obs_dim(self) -> int:
        return self.layout.total_dim

    @property
    def action_dim(self) -> int:
        return self.action_map.dim

    def reset(self, seed: int) -> np.ndarray:
        self.episode = machine.reset(self.task, seed, self.backend)
        self._last_state = self.backend.snapshot()
        return assemble_observation(self._last_state, self.task, self.layout, self.episode)

    def step(self, action: np.ndarray):
        """Advance one control step; returns (obs, breakdown, status, info)."""
        if self.episode is None:
            raise RuntimeError("step() before reset()")
        targets = self.action_map.denormalize(action)
        state = self.backend.step(targets, self.substeps)
        self.episode, bonus = machine.advance_task_stage(
            self.task, state, self.episode, backend=self.backend)
        effort_input = self.action_map.expand(np.clip(action, -1.0, 1.0))
        breakdown = compute_reward(self.task, state, effort_input, self.episode,
                                   sparse_bonus=bonus)
        status = machine.check_termination(self.task, state, self.episode)
        obs = assemble_observation(state, self.task, self.layout, self.episode)
        self._last_state = state
        info = {
            "stage": self.episode.stage,
            "checkpoint_index": self.episode.checkpoint_index,
            "completed_subtasks": self.episode.completed_subtasks,
            "sparse_accumulated": self.episode.sparse_accumulated,
        }
        return obs, breakdown, status, info

    def state(self):
        return self._last_state

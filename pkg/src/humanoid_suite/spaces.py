"""Observation assembly and action normalization.

Variants: "full" exposes every joint in both spaces; "blocked" keeps the
full model but pins hand actuation to zero (agent action shrinks to the
body joints); "reduced" additionally drops hand joints from the
observation; "no_hands" is the hand-less robot model.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .config import RobotModel, TaskSpec

VARIANTS = ("full", "blocked", "reduced", "no_hands")

BODY_TORQUE_LIMIT = 150.0   # Nm, torque-mode range for body actuators
HAND_TORQUE_LIMIT = 5.0


@dataclass
class ObservationLayout:
    task_id: str
    variant: str
    segments: list                  # [{name, source, offset, len}]
    total_dim: int

    def to_manifest(self) -> dict:
        return {"task": self.task_id, "variant": self.variant,
                "total_dim": self.total_dim, "segments": list(self.segments)}

    def manifest_text(self) -> str:
        return json.dumps(self.to_manifest(), indent=2)


def _base_dims(robot: RobotModel, variant: str) -> tuple:
    if variant in ("reduced", "no_hands") and robot.has_hands:
        nq = 7 + len(robot.body_joints)
        nv = 6 + len(robot.body_joints)
    else:
        nq, nv = robot.nq, robot.nv
    return nq, nv


def build_layout(task: TaskSpec, variant: str = "full") -> ObservationLayout:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    robot = task.robot
    nq, nv = _base_dims(robot, variant)
    base_len = (nq - 2) + nv
    segments = [{"name": "robot_base", "source": "robot_base", "offset": 0, "len": base_len}]
    offset = base_len
    for seg in task.observation_segments:
        segments.append({"name": seg["name"], "source": seg["source"],
                         "offset": offset, "len": seg["len"]})
        offset += seg["len"]
    return ObservationLayout(task.id, variant, segments, offset)


class MissingSegmentError(KeyError):
    pass


def assemble_observation(state, task: TaskSpec, layout: ObservationLayout,
                         episode=None) -> np.ndarray:
    """Concatenate the layout's segments from one snapshot.

    Deterministic: same state, same bytes. Episode is only consulted for
    episode-scoped segments (bookshelf's next-subtask index).
    """
    robot = task.robot
    nq, nv = _base_dims(robot, layout.variant)
    parts = []
    for seg in layout.segments:
        source = seg["source"]
        try:
            if source == "robot_base":
                parts.append(state.joint_pos[2:nq])
                parts.append(state.joint_vel[:nv])
            elif source.startswith("body_pos:"):
                parts.append(state.body_pos(source[9:]))
            elif source.startswith("body_pose:"):
                parts.append(state.body_pose[source[10:]])
            elif source.startswith("body_quat:"):
                parts.append(state.body_quat(source[10:]))
            elif source.startswith("body_vel:"):
                parts.append(state.linvel(source[9:]))
            elif source.startswith("site:"):
                parts.append(state.site(source[5:]))
            elif source.startswith("joint_pos:"):
                parts.append(state.joint_pos[task.scene_joint_qpos_index(source[10:]):][:1])
            elif source.startswith("joint_vel:"):
                parts.append(state.joint_vel[task.scene_joint_qvel_index(source[10:]):][:1])
            elif source == "episode:next_subtask":
                if episode is None:
                    raise MissingSegmentError(
                        f"segment {seg['name']!r} needs episode state")
                idx = min(episode.stage, len(episode.subtask_order) - 1)
                parts.append(np.array([float(episode.subtask_order[idx])]))
            else:
                raise MissingSegmentError(f"unknown segment source {source!r}")
        except KeyError as err:
            raise MissingSegmentError(
                f"segment {seg['name']!r} ({source}) unavailable: {err}") from None
    obs = np.concatenate(parts)
    if obs.shape[0] != layout.total_dim:
        raise RuntimeError(f"layout dim mismatch: built {obs.shape[0]}, "
                           f"declared {layout.total_dim}")
    return obs


@dataclass
class ActionMap:
    """Affine map from normalized agent actions to per-actuator targets."""

    robot: RobotModel
    variant: str = "full"
    mode: str = "position"
    clamp_count: int = 0
    _mids: np.ndarray = field(init=False, repr=False, default=None)
    _halves: np.ndarray = field(init=False, repr=False, default=None)

    def __post_init__(self):
        if self.mode not in ("position", "torque"):
            raise ValueError(f"unknown control mode {self.mode!r}")
        joints = [self.robot.joint_by_name(n) for n in self.robot.actuated_names]
        if self.mode == "position":
            self._mids = np.array([j.mid for j in joints])
            self._halves = np.array([j.half_range for j in joints])
        else:
            n_body = len(self.robot.body_joints)
            limits = np.array([BODY_TORQUE_LIMIT] * n_body
                              + [HAND_TORQUE_LIMIT] * (len(joints) - n_body))
            self._mids = np.zeros(len(joints))
            self._halves = limits
        self._n_body = len(self.robot.body_joints)

    @property
    def dim(self) -> int:
        """Agent-facing action dimension."""
        if self.variant == "full":
            return self.robot.action_dim
        return self._n_body

    @property
    def blocked(self) -> bool:
        return self.variant in ("blocked", "reduced") and self.robot.has_hands

    def denormalize(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.float64)
        if a.shape != (self.dim,):
            raise ValueError(f"expected action of dim {self.dim}, got {a.shape}")
        clipped = np.clip(a, -1.0, 1.0)
        self.clamp_count += int(np.sum(clipped != a))
        if self.blocked:
            # hands pinned to zero actuation: targets sit at range midpoints
            expanded = np.zeros(self.robot.action_dim)
            expanded[:self._n_body] = clipped
            clipped = expanded
        return self._mids + clipped * self._halves

    def normalize(self, targets: np.ndarray) -> np.ndarray:
        targets = np.asarray(targets, dtype=np.float64)
        full = (targets - self._mids) / self._halves
        if self.blocked:
            return full[:self._n_body]
        return full

    def expand(self, a: np.ndarray) -> np.ndarray:
        """Full actuation vector for the effort term (hands zero when blocked)."""
        a = np.asarray(a, dtype=np.float64)
        if not self.blocked:
            return a
        expanded = np.zeros(self.robot.action_dim)
        expanded[:self._n_body] = a
        return expanded

"""Task and robot configuration loading.

Every task is described by a declarative YAML file under configs/tasks/;
those files are the single source of truth for reward constants, termination
rules, stage schedules, initialization recipes, observation layouts, and the
scene manifest consumed by the scripted backend. The reward kernel and the
verification oracle both read the same loaded spec.
"""

import copy
from dataclasses import dataclass, field
from importlib import resources


import numpy as np
import yaml

_CONFIG_ROOT = resources.files("humanoid_suite") / "configs"


class UnknownTaskError(KeyError):
    pass


@dataclass(frozen=True)
class Joint:
    name: str
    lower: float
    upper: float
    home: float = 0.0

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def half_range(self) -> float:
        return 0.5 * (self.upper - self.lower)


@dataclass
class RobotModel:
    """Synthetic humanoid description shared by backends and layouts.

    qpos layout: root free joint (7), then hinge joints in declaration
    order, with each hand wrist stored as a quaternion block (4 qpos /
    3 qvel). Scene joints are appended after nq/nv by the backend.
    """

    name: str
    body_joints: list
    hand_joints: dict            # side -> list[Joint] (22 hinges per hand)
    actuated_names: list         # actuator order: 19 body + 21 + 21 hand
    body_offsets: dict           # body name -> offset from root, root frame
    site_offsets: dict           # site name -> offset from root, root frame
    hand_jacobian: dict          # side -> (joint names, 3x4 matrix)
    geoms: list                  # robot geom names for contact classification
    root_home_pos: np.ndarray
    root_home_quat: np.ndarray

    @property
    def has_hands(self) -> bool:
        return bool(self.hand_joints)

    @property
    def nq(self) -> int:
        n = 7 + len(self.body_joints)
        for side in self.hand_joints:
            n += 4 + len(self.hand_joints[side])
        return n

    @property
    def nv(self) -> int:
        n = 6 + len(self.body_joints)
        for side in self.hand_joints:
            n += 3 + len(self.hand_joints[side])
        return n

    @property
    def action_dim(self) -> int:
        return len(self.actuated_names)

    @property
    def base_obs_dim(self) -> int:
        # root x,y excluded from observed positions
        return (self.nq - 2) + self.nv

    def hinge_qpos_index(self, name: str) -> int:
        """qpos index of a named hinge joint (root/wrist blocks skipped)."""
        idx = 7
        for j in self.body_joints:
            if j.name == name:
                return idx
            idx += 1
        for side in ("left", "right"):
            if side not in self.hand_joints:
                continue
            idx += 4  # wrist quaternion block
            for j in self.hand_joints[side]:
                if j.name == name:
                    return idx
                idx += 1
        raise KeyError(f"robot has no hinge joint {name!r}")

    def hinge_qvel_index(self, name: str) -> int:
        idx = 6
        for j in self.body_joints:
            if j.name == name:
                return idx
            idx += 1
        for side in ("left", "right"):
            if side not in self.hand_joints:
                continue
            idx += 3
            for j in self.hand_joints[side]:
                if j.name == name:
                    return idx
                idx += 1
        raise KeyError(f"robot has no hinge joint {name!r}")

    def joint_by_name(self, name: str) -> Joint:
        for j in self.body_joints:
            if j.name == name:
                return j
        for side in self.hand_joints:
            for j in self.hand_joints[side]:
                if j.name == name:
                    return j
        raise KeyError(f"robot has no joint {name!r}")

    def home_qpos(self) -> np.ndarray:
        q = np.zeros(self.nq)
        q[0:3] = self.root_home_pos
        q[3:7] = self.root_home_quat
        idx = 7
        for j in self.body_joints:
            q[idx] = j.home
            idx += 1
        for side in ("left", "right"):
            if side not in self.hand_joints:
                continue
            q[idx] = 1.0  # identity wrist quaternion
            idx += 4
            for j in self.hand_joints[side]:
                q[idx] = j.home
                idx += 1
        return q

    def actuated_qpos_indices(self) -> np.ndarray:
        return np.array([self.hinge_qpos_index(n) for n in self.actuated_names], dtype=np.int64)

    def hinge_joint_names(self) -> list:
        names = [j.name for j in self.body_joints]
        for side in ("left", "right"):
            names.extend(j.name for j in self.hand_joints.get(side, ()))
        return names


@dataclass
class SceneManifest:
    """Named entities of a task scene, shared by backends and rewards."""

    bodies: dict = field(default_factory=dict)    # name -> home pose (7,)
    sites: dict = field(default_factory=dict)     # name -> {pos, attach, offset}
    objects: dict = field(default_factory=dict)   # name -> object params
    joints: list = field(default_factory=list)    # scene joints, appended after robot
    obstacle_classes: dict = field(default_factory=dict)  # role -> [geom names]
    mjcf: str = ""
    robot_root_pos: np.ndarray = None             # per-task home override

    def scene_joint_index(self, name: str) -> int:
        for i, j in enumerate(self.joints):
            if j["name"] == name:
                return i
        raise KeyError(f"scene has no joint {name!r}")


@dataclass
class TaskSpec:
    """Static definition of one benchmark task."""

    id: str
    family: str
    program: str
    episode_cap: int
    success_target: float
    robot: RobotModel
    common: dict
    constants: dict
    termination: dict
    stages: dict
    init: dict
    observation_segments: list
    scene: SceneManifest
    respawn_targets: bool = False

    def scene_joint_qpos_index(self, name: str) -> int:
        return self.robot.nq + self.scene.scene_joint_index(name)

    def scene_joint_qvel_index(self, name: str) -> int:
        return self.robot.nv + self.scene.scene_joint_index(name)


def _load_yaml(relative: str) -> dict:
    with (_CONFIG_ROOT / relative).open("r", encoding="utf-8") as fh:
        return yaml.safe_load(fh)


def _as_float(v):
    if v == "inf":
        return float("inf")
    if v == "-inf":
        return float("-inf")
    return float(v)


def _parse_joint(d: dict) -> Joint:
    lo, hi = d["range"]
    return Joint(d["name"], _as_float(lo), _as_float(hi), float(d.get("home", 0.0)))


def load_robot(name: str) -> RobotModel:
    raw = _load_yaml(f"robot_{name}.yaml")
    hand_joints = {side: [_parse_joint(j) for j in js]
                   for side, js in raw.get("hand_joints", {}).items()}
    jac = {}
    for side, spec in raw.get("hand_jacobian", {}).items():
        jac[side] = (list(spec["joints"]), np.array(spec["matrix"], dtype=np.float64))
    return RobotModel(
        name=name,
        body_joints=[_parse_joint(j) for j in raw["body_joints"]],
        hand_joints=hand_joints,
        actuated_names=list(raw["actuated"]),
        body_offsets={k: np.array(v, dtype=np.float64) for k, v in raw["bodies"].items()},
        site_offsets={k: np.array(v, dtype=np.float64) for k, v in raw["sites"].items()},
        hand_jacobian=jac,
        geoms=list(raw["geoms"]),
        root_home_pos=np.array(raw["root"]["pos"], dtype=np.float64),
        root_home_quat=np.array(raw["root"]["quat"], dtype=np.float64),
    )


def _deep_floats(node):
    """Convert 'inf'/'-inf' strings to floats anywhere in a config tree."""
    if isinstance(node, dict):
        return {k: _deep_floats(v) for k, v in node.items()}
    if isinstance(node, list):
        return [_deep_floats(v) for v in node]
    if node == "inf" or node == "-inf":
        return _as_float(node)
    return node


def list_tasks() -> list:
    names = sorted(p.name[:-5] for p in (_CONFIG_ROOT / "tasks").iterdir()
                   if p.name.endswith(".yaml"))
    return names


_robot_cache = {}
_common_cache = {}


def load_common() -> dict:
    if "c" not in _common_cache:
        _common_cache["c"] = _deep_floats(_load_yaml("common.yaml"))
    return copy.deepcopy(_common_cache["c"])


def load_task(task_id: str, robot: str = None, respawn_targets: bool = None,
              constants_override: dict = None) -> TaskSpec:
    """Build a TaskSpec from its shipped config file.

    constants_override shallow-merges into the reward constants; it exists
    for verification harnesses that need to perturb the kernel side only.
    """
    try:
        raw = _load_yaml(f"tasks/{task_id}.yaml")
    except FileNotFoundError:
        raise UnknownTaskError(
            f"unknown task {task_id!r}; known tasks: {', '.join(list_tasks())}") from None
    raw = _deep_floats(raw)

    robot_name = robot or raw.get("robot", "full")
    if robot_name not in _robot_cache:
        _robot_cache[robot_name] = load_robot(robot_name)
    model = _robot_cache[robot_name]

    scene_raw = raw.get("scene", {})
    scene = SceneManifest(
        bodies={k: np.array(v, dtype=np.float64) for k, v in scene_raw.get("bodies", {}).items()},
        sites=scene_raw.get("sites", {}),
        objects=scene_raw.get("objects", {}),
        joints=scene_raw.get("joints", []),
        obstacle_classes=scene_raw.get("obstacle_classes", {}),
        mjcf=scene_raw.get("mjcf", ""),
        robot_root_pos=(np.array(scene_raw["robot_root_pos"], dtype=np.float64)
                        if "robot_root_pos" in scene_raw else None),
    )

    constants = raw.get("constants", {})
    if constants_override:
        constants = {**constants, **constants_override}

    flag = raw.get("respawn_targets", False) if respawn_targets is None else respawn_targets

    return TaskSpec(
        id=raw["id"],
        family=raw.get("family", "manipulation"),
        program=raw.get("program", raw["id"]),
        episode_cap=int(raw["episode_cap"]),
        success_target=float(raw["success_target"]),
        robot=model,
        common=load_common(),
        constants=constants,
        termination=raw.get("termination", {}),
        stages=raw.get("stages", {}),
        init=raw.get("init", {}),
        observation_segments=raw.get("observation", {}).get("segments", []),
        scene=scene,
        respawn_targets=bool(flag),
    )

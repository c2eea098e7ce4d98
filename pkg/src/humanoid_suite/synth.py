"""Synthetic world-state generation for verification sweeps.

Draws random-but-valid snapshots covering every named entity a task reads,
so the reward kernel can be diffed against the reference transcription
without any physics backend.
"""

import numpy as np

from .config import TaskSpec
from .state import Contact, WorldState


def _unit_quat(rng) -> np.ndarray:
    q = rng.normal(size=4)
    n = np.linalg.norm(q)
    while n < 1e-8:
        q = rng.normal(size=4)
        n = np.linalg.norm(q)
    return q / n


def _pose(rng, low=-3.0, high=3.0, z_high=3.0) -> np.ndarray:
    pos = rng.uniform([low, low, 0.0], [high, high, z_high])
    return np.concatenate([pos, _unit_quat(rng)])


def random_episode(task: TaskSpec, rng) -> "SynthEpisode":
    stage = 0
    checkpoint_index = 0
    categories = ()
    order = tuple(range(5))
    if task.program == "cabinet":
        stage = int(rng.integers(0, 4))
    elif task.program == "bookshelf":
        stage = int(rng.integers(0, 5))
        order = tuple(rng.permutation(5).tolist())
    elif task.program == "basketball":
        stage = int(rng.integers(0, 2))
    elif task.program == "maze":
        checkpoint_index = int(rng.integers(0, len(task.stages["checkpoints"])))
    elif task.program == "truck":
        categories = tuple(rng.choice(["truck", "picked", "table"],
                                      size=len(task.constants["packages"])).tolist())
    return SynthEpisode(stage=stage, checkpoint_index=checkpoint_index,
                        package_categories=categories, subtask_order=order)


class SynthEpisode:
    """Minimal stand-in exposing the episode fields reward programs read."""

    def __init__(self, stage=0, checkpoint_index=0, package_categories=(), subtask_order=()):
        self.stage = stage
        self.checkpoint_index = checkpoint_index
        self.package_categories = package_categories
        self.subtask_order = subtask_order
        self.all_subtasks_done = False


def random_state(task: TaskSpec, rng, allow_contacts: bool = True) -> WorldState:
    robot = task.robot
    n_scene = len(task.scene.joints)
    joint_pos = rng.uniform(-2.0, 2.0, robot.nq + n_scene)
    joint_vel = rng.uniform(-4.0, 4.0, robot.nv + n_scene)
    for i, j in enumerate(task.scene.joints):
        joint_pos[robot.nq + i] = rng.uniform(j["range"][0], j["range"][1])

    body_pose = {}
    site_pos = {}
    body_linvel = {}

    root = _pose(rng)
    for name in robot.body_offsets:
        body_pose[name] = _pose(rng)
    body_pose["pelvis"] = root
    for name in robot.site_offsets:
        site_pos[name] = rng.uniform([-3.0, -3.0, 0.0], [3.0, 3.0, 3.0])
    for name in task.scene.bodies:
        body_pose[name] = _pose(rng)
    for name in task.scene.objects:
        body_pose[name] = _pose(rng)
        body_linvel[name] = rng.uniform(-3.0, 3.0, 3)
    for name in task.scene.sites:
        site_pos[name] = rng.uniform([-3.0, -3.0, 0.0], [3.0, 3.0, 3.0])
    body_linvel["pelvis"] = rng.uniform(-4.0, 4.0, 3)

    contacts = []
    if allow_contacts and rng.random() < 0.5:
        pool = [g for geoms in task.scene.obstacle_classes.values() for g in geoms]
        for obj in task.scene.objects.values():
            pool.append(obj["geom"])
        pool.append("floor")
        if pool:
            robot_geom = robot.geoms[int(rng.integers(0, len(robot.geoms)))]
            other = pool[int(rng.integers(0, len(pool)))]
            contacts.append(Contact(robot_geom, other, float(rng.uniform(0.0, 50.0))))
        if len(pool) >= 2 and rng.random() < 0.5:
            a, b = rng.choice(len(pool), size=2, replace=False)
            contacts.append(Contact(pool[int(a)], pool[int(b)], float(rng.uniform(0.0, 50.0))))

    return WorldState(
        joint_pos=joint_pos,
        joint_vel=joint_vel,
        body_pose=body_pose,
        site_pos=site_pos,
        body_linvel=body_linvel,
        pelvis_frame_vel=(float(rng.uniform(-6.0, 6.0)), float(rng.uniform(-6.0, 6.0))),
        z_proj=float(rng.uniform(-1.0, 1.0)),
        contacts=tuple(contacts),
        step_index=int(rng.integers(0, task.episode_cap + 1)),
    ).validate()


def random_action(task: TaskSpec, rng) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, task.robot.action_dim)

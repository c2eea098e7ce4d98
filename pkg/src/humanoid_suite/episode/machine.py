"""Per-episode lifecycle: initialization, termination, stage progression.

All randomness for an episode flows from one seeded generator created in
reset(); recipe order in the task config fixes the draw order, so a seed
fully determines the episode start and every later stochastic injection.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..config import TaskSpec
from ..state import WorldState

GRAVITY = 9.81


@dataclass
class TerminationStatus:
    terminated: bool
    reason: str = None

    def __post_init__(self):
        if self.terminated and self.reason is None:
            raise ValueError("terminated status needs a reason")
        if not self.terminated and self.reason is not None:
            raise ValueError("reason present without termination")


@dataclass
class EpisodeState:
    task_id: str
    seed: int
    rng: np.random.Generator
    step_index: int = 0
    stage: int = 0
    completed_subtasks: tuple = ()
    checkpoint_index: int = 0
    sparse_accumulated: float = 0.0
    targets: dict = field(default_factory=dict)
    subtask_order: tuple = ()
    package_categories: tuple = ()
    bonuses_paid: set = field(default_factory=set)
    all_subtasks_done: bool = False
    targets_reached: int = 0
    init_info: dict = field(default_factory=dict)


class SceneError(RuntimeError):
    """Backend scene is missing entities the task needs."""


def _yaw_quat(angle: float) -> np.ndarray:
    return np.array([math.cos(0.5 * angle), 0.0, 0.0, math.sin(0.5 * angle)])


def _check_scene(task: TaskSpec, backend) -> None:
    state = backend.snapshot()
    missing = []
    for name in ("pelvis", "head"):
        if name not in state.body_pose:
            missing.append(f"body:{name}")
    for name in task.scene.bodies:
        if name not in state.body_pose:
            missing.append(f"body:{name}")
    for name in task.scene.objects:
        if name not in state.body_pose:
            missing.append(f"body:{name}")
    for name in task.scene.sites:
        if name not in state.site_pos:
            missing.append(f"site:{name}")
    if missing:
        raise SceneError(f"scene for {task.id!r} is missing: {', '.join(sorted(missing))}")


def reset(task: TaskSpec, seed: int, backend) -> EpisodeState:
    """Reinitialize the backend for a fresh episode and build its state."""
    rng = np.random.default_rng(seed)
    backend.reset_home()
    _check_scene(task, backend)

    episode = EpisodeState(task_id=task.id, seed=seed, rng=rng,
                           subtask_order=tuple(range(_n_subtasks(task))))

    noise = float(task.init.get("joint_noise", 0.0))
    if noise > 0.0:
        names = task.robot.hinge_joint_names()
        offsets = rng.uniform(-noise, noise, len(names))
        backend.offset_hinge_joints(dict(zip(names, offsets)))

    for recipe in task.init.get("recipes", ()):
        _apply_recipe(task, recipe, backend, episode)

    if task.program == "truck":
        episode.package_categories = _classify_packages(task, backend.snapshot())

    backend.commit_reset()
    return episode


def _n_subtasks(task: TaskSpec) -> int:
    if task.program == "bookshelf":
        return len(task.stages["objects"])
    if task.program == "cabinet":
        return len(task.stages["subtasks"])
    if task.program == "kitchen":
        return len(task.stages["subtasks"])
    return 0


def _apply_recipe(task: TaskSpec, recipe: dict, backend, episode: EpisodeState) -> None:
    kind = recipe["recipe"]
    rng = episode.rng
    if kind == "sample_site":
        pos = rng.uniform(recipe["low"], recipe["high"])
        backend.set_site_pos(recipe["site"], pos)
        episode.targets[recipe["site"]] = pos.copy()
    elif kind == "sample_sites":
        for site in recipe["sites"]:
            pos = rng.uniform(recipe["low"], recipe["high"])
            backend.set_site_pos(site, pos)
            episode.targets[site] = pos.copy()
    elif kind == "sample_object_pos":
        pos = rng.uniform(recipe["low"], recipe["high"])
        backend.set_object(recipe["object"], pos=pos)
    elif kind == "sample_object_quat":
        for obj in recipe["objects"]:
            backend.set_object(obj, quat=_random_quat(rng))
    elif kind == "sample_body_quat":
        pose = backend.snapshot().body_pose[recipe["body"]]
        backend.set_body_pose(recipe["body"], pose[:3], _random_quat(rng))
    elif kind == "sample_root_pose":
        angle = float(rng.uniform(*recipe["yaw_range"]))
        x = float(rng.uniform(*recipe["x_range"]))
        y = float(rng.uniform(*recipe["y_range"]))
        home_z = backend.snapshot().body_pose["pelvis"][2]
        backend.set_root_pose(np.array([x, y, home_z]), _yaw_quat(angle))
        episode.init_info["root_yaw"] = angle
        episode.init_info["root_xy"] = (x, y)
    elif kind == "shuffle_subtask_order":
        episode.subtask_order = tuple(int(i) for i in rng.permutation(recipe["n"]))
    elif kind == "scatter_objects":
        for obj in recipe["objects"]:
            backend.set_object(obj, pos=rng.uniform(recipe["low"], recipe["high"]))
    elif kind == "basketball_launch":
        state = backend.snapshot()
        pelvis = state.body_pose["pelvis"][:3]
        angle = float(rng.uniform(*recipe["angle_range"]))
        radius = recipe["radius"]
        spawn = pelvis + radius * np.array([math.cos(angle), math.sin(angle), 0.0])
        catch = pelvis + np.asarray(recipe["catch_offset"], dtype=np.float64)
        t = recipe["flight_time"]
        ball = task.stages["ball"]
        has_gravity = task.scene.objects[ball].get("gravity", False)
        vel = (catch - spawn) / t
        if has_gravity:
            vel = vel + np.array([0.0, 0.0, 0.5 * GRAVITY * t])
        backend.set_object(ball, pos=spawn, vel=vel)
        episode.init_info["ball_angle"] = angle
        episode.init_info["ball_spawn"] = spawn.copy()
    else:
        raise ValueError(f"unknown init recipe {kind!r}")


def _random_quat(rng) -> np.ndarray:
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


# ---------------------------------------------------------------------------
# termination


def _resolve_point(state: WorldState, ref: str) -> np.ndarray:
    kind, name = ref.split(":", 1)
    return state.body_pos(name) if kind == "body" else state.site(name)


def check_termination(task: TaskSpec, state: WorldState, episode: EpisodeState) -> TerminationStatus:
    """Apply the task's cap and failure/success predicates to one snapshot.

    Evaluation order (documented, deterministic): success, object drops,
    height/orientation failures, collision failures, timeout.
    """
    term = task.termination
    success = term.get("success")
    if success is not None:
        if success["kind"] == "distance_below":
            a = _resolve_point(state, success["a"])
            b = _resolve_point(state, success["b"])
            if float(np.linalg.norm(a - b)) < success["threshold"]:
                return TerminationStatus(True, "success")
        elif success["kind"] == "all_subtasks":
            if episode is not None and episode.all_subtasks_done:
                return TerminationStatus(True, "success")
        elif success["kind"] == "all_delivered":
            if episode is not None and episode.package_categories and \
                    all(c == "table" for c in episode.package_categories):
                return TerminationStatus(True, "success")
    for drop in term.get("drops", ()):
        if float(state.body_pos(drop["body"])[2]) < drop["below"]:
            return TerminationStatus(True, "object_dropped")
    if term.get("pelvis_below") is not None:
        if float(state.body_pos("pelvis")[2]) < term["pelvis_below"]:
            return TerminationStatus(True, "failure_height")
    if term.get("zproj_below") is not None and state.z_proj < term["zproj_below"]:
        return TerminationStatus(True, "failure_height")
    if term.get("head_below") is not None:
        if float(state.body_pos("head")[2]) < term["head_below"]:
            return TerminationStatus(True, "failure_height")
    for rule in term.get("collision_rules", ()):
        if rule["kind"] == "only_allowed":
            allowed = set(rule["allowed"])
            for contact in state.contacts:
                pair = (contact.geom_a, contact.geom_b)
                if rule["geom"] in pair:
                    other = pair[0] if pair[1] == rule["geom"] else pair[1]
                    if other not in allowed:
                        return TerminationStatus(True, "failure_collision")
        elif rule["kind"] == "forbidden_pair":
            want = frozenset(rule["geoms"])
            for contact in state.contacts:
                if contact.pair() == want:
                    return TerminationStatus(True, "failure_collision")
    if state.step_index >= task.episode_cap:
        return TerminationStatus(True, "timeout")
    return TerminationStatus(False)


# ---------------------------------------------------------------------------
# stage progression and sparse bonuses


def advance_task_stage(task: TaskSpec, state: WorldState, episode: EpisodeState,
                       backend=None) -> tuple:
    """Run subtask/stage bookkeeping after a physics step.

    Returns (episode, sparse_bonus). Called once per control step, after
    stepping and before reward evaluation, so a completing step sees both
    the stage switch and its bonus.
    """
    episode.step_index = state.step_index
    bonus = 0.0
    program = task.program

    if program == "cabinet":
        subtasks = task.stages["subtasks"]
        if episode.stage < len(subtasks):
            sub = subtasks[episode.stage]
            if _subtask_done(task, sub, state):
                bonus += sub["bonus"]
                episode.completed_subtasks += (episode.stage,)
                episode.stage += 1
                if episode.stage == len(subtasks):
                    bonus += task.stages["all_done_bonus"]
                    episode.all_subtasks_done = True

    elif program == "bookshelf":
        objs = task.stages["objects"]
        if episode.stage < len(objs):
            pair = episode.subtask_order[episode.stage]
            obj = state.body_pos(objs[pair])
            dest = state.site(task.stages["destinations"][pair])
            if float(np.linalg.norm(obj - dest)) < task.stages["threshold"]:
                bonus += task.stages["bonus_scale"] * (episode.stage + 1)
                episode.completed_subtasks += (episode.stage,)
                episode.stage += 1
                if episode.stage == len(objs):
                    episode.all_subtasks_done = True

    elif program == "maze":
        checkpoints = task.stages["checkpoints"]
        if episode.checkpoint_index < len(checkpoints):
            cp = np.asarray(checkpoints[episode.checkpoint_index], dtype=np.float64)
            if float(np.linalg.norm(state.body_pos("pelvis") - cp)) < task.stages["radius"]:
                bonus += task.stages["bonus_scale"] * (episode.checkpoint_index + 1)
                episode.completed_subtasks += (episode.checkpoint_index,)
                episode.checkpoint_index += 1

    elif program == "basketball":
        ball_geom = task.stages["ball_geom"]
        if episode.stage == 0:
            if any(c.involves((ball_geom,)) for c in state.contacts):
                episode.stage = 1
        ball = state.body_pos(task.stages["ball"])
        basket = state.site(task.stages["basket_site"])
        if "basketball_success" not in episode.bonuses_paid:
            if float(np.linalg.norm(ball - basket)) < task.stages["success_threshold"]:
                bonus += task.stages["success_bonus"]
                episode.bonuses_paid.add("basketball_success")

    elif program == "truck":
        episode.package_categories = _classify_packages(task, state)
        if all(c == "table" for c in episode.package_categories):
            if "truck_delivered" not in episode.bonuses_paid:
                bonus += task.stages["all_done_bonus"]
                episode.bonuses_paid.add("truck_delivered")
                episode.all_subtasks_done = True

    elif program == "kitchen":
        for i, sub in enumerate(task.stages["subtasks"]):
            if i in episode.completed_subtasks:
                continue
            if _subtask_done(task, sub, state):
                episode.completed_subtasks += (i,)
                bonus += 1.0
        if len(episode.completed_subtasks) == len(task.stages["subtasks"]):
            episode.all_subtasks_done = True

    elif program == "spoon" and backend is not None:
        from ..rewards.tasks import spoon_destination
        dest = spoon_destination(task, state)
        backend.set_site_pos("spoon_target", dest)
        state.site_pos["spoon_target"] = dest

    if task.respawn_targets and program == "reach":
        bonus += _respawn_reach(task, state, episode, backend)

    episode.sparse_accumulated += bonus
    return episode, bonus


def _respawn_reach(task: TaskSpec, state: WorldState, episode: EpisodeState, backend) -> float:
    c = task.constants
    bonus = 0.0
    hand = state.site(c["hand_site"])
    target = state.site(c["target_site"])
    if float(np.linalg.norm(hand - target)) < c["success_threshold"]:
        recipe = next(r for r in task.init["recipes"]
                      if r["recipe"] == "sample_site" and r["site"] == c["target_site"])
        new_target = episode.rng.uniform(recipe["low"], recipe["high"])
        if backend is not None:
            backend.set_site_pos(c["target_site"], new_target)
        state.site_pos[c["target_site"]] = new_target
        episode.targets[c["target_site"]] = new_target.copy()
        episode.targets_reached += 1
        bonus += c["success_bonus"]
    pert = task.init.get("perturbation")
    if pert and pert.get("enabled") and backend is not None:
        for body in pert["bodies"]:
            force = episode.rng.uniform(-pert["magnitude"], pert["magnitude"], 3)
            backend.apply_perturbation(body, force)
    return bonus


def _subtask_done(task: TaskSpec, sub: dict, state: WorldState) -> bool:
    kind = sub["kind"]
    if kind == "joint_at_least":
        q = state.joint_pos[task.scene_joint_qpos_index(sub["joint"])]
        return bool(q >= sub["value"] - 1e-12)
    if kind == "joint_near":
        q = state.joint_pos[task.scene_joint_qpos_index(sub["joint"])]
        return bool(abs(q - sub["goal"]) < sub["threshold"])
    if kind == "body_near":
        pos = state.body_pos(sub["body"])
        return bool(np.linalg.norm(pos - np.asarray(sub["goal"])) < sub["threshold"])
    if kind == "body_in_box":
        pos = state.body_pos(sub["body"])
        return bool(abs(pos[0] - sub["x_center"]) <= sub["x_half"]
                    and abs(pos[1] - sub["y_center"]) <= sub["y_half"]
                    and abs(pos[2] - sub["z_center"]) <= sub["z_half"])
    raise ValueError(f"unknown subtask kind {kind!r}")


def _classify_packages(task: TaskSpec, state: WorldState) -> tuple:
    table = task.stages["table_region"]
    truck = task.stages["truck_region"]

    def in_region(pos, region):
        c = np.asarray(region["center"])
        h = np.asarray(region["half"])
        return bool(np.all(np.abs(pos - c) <= h))

    cats = []
    for name in task.stages["packages"]:
        pos = state.body_pos(name)
        if in_region(pos, table):
            cats.append("table")
        elif in_region(pos, truck):
            cats.append("truck")
        else:
            cats.append("picked")
    return tuple(cats)

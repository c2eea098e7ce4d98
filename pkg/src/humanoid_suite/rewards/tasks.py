"""Dense reward programs for every benchmark task.

Each program is a pure function of (task spec, world snapshot, action,
episode) and returns a named term dict plus the dense total. Constants come
exclusively from the task config so the verification oracle can read the
same numbers.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..config import TaskSpec, UnknownTaskError
from . import terms as T
from .tolerance import Bounds, ToleranceSpec, tolerance


@dataclass
class RewardBreakdown:
    dense: float
    sparse: float
    total: float
    terms: dict = field(default_factory=dict)

    @classmethod
    def make(cls, dense: float, sparse: float, term_map: dict) -> "RewardBreakdown":
        for name, value in term_map.items():
            if not math.isfinite(value):
                raise ValueError(f"non-finite reward term {name!r}: {value}")
        if not math.isfinite(dense):
            raise ValueError("non-finite dense reward")
        return cls(dense=dense, sparse=sparse, total=dense + sparse, terms=dict(term_map))


class MissingStageError(RuntimeError):
    """Raised when a staged task is evaluated without episode state."""


def _tol(x, bounds, margin, common, constants=None):
    c = constants or {}
    vam = c.get("value_at_margin", common["tolerance"]["value_at_margin"])
    sig = c.get("sigmoid", common["tolerance"]["sigmoid"])
    return tolerance(x, ToleranceSpec(Bounds(bounds[0], bounds[1]), margin, vam, sig))


def _dist(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)))


def _require_episode(episode, task_id):
    if episode is None:
        raise MissingStageError(f"task {task_id!r} is staged and needs episode state")
    return episode


# ---------------------------------------------------------------------------
# locomotion programs


def _walk_like(tsk, state, action, move_key="move"):
    p = T.posture_terms(state, action, tsk.common)
    c = tsk.constants
    move = _tol(state.pelvis_frame_vel[0], c["move_bounds"], c["move_margin"], tsk.common, c)
    p[move_key] = move
    return p


def reward_walk(tsk, state, action, episode):
    p = _walk_like(tsk, state, action)
    dense = p["stable"] * p["move"]
    return dense, p


def reward_stand(tsk, state, action, episode):
    p = T.posture_terms(state, action, tsk.common)
    dense = p["stable"] * 0.5 * (p["still_x"] + p["still_y"])
    return dense, p


def reward_run(tsk, state, action, episode):
    p = _walk_like(tsk, state, action)
    dense = p["stable"] * p["move"]
    return dense, p


def reward_sit(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    robot = state.body_pos("pelvis")
    chair = state.body_pos(c["chair_body"])
    p["sitting_x"] = _tol(float(robot[0] - chair[0]), c["sitting_x_bounds"], c["sitting_x_margin"], tsk.common, c)
    p["sitting_y"] = _tol(float(robot[1] - chair[1]), c["sitting_y_bounds"], c["sitting_y_margin"], tsk.common, c)
    p["sitting_z"] = _tol(float(robot[2]), c["sitting_z_bounds"], c["sitting_z_margin"], tsk.common, c)
    z_imu = float(state.site("imu")[2])
    z_head = float(state.body_pos("head")[2])
    p["posture"] = _tol(z_head - z_imu, c["posture_bounds"], c["posture_margin"], tsk.common, c)
    seat = 0.5 * p["sitting_z"] + 0.5 * p["sitting_x"] * p["sitting_y"]
    dense = (seat * p["upright"] * p["posture"]) * p["effort"] * 0.5 * (p["still_x"] + p["still_y"])
    return dense, p


def reward_balance(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    z_head = float(state.body_pos("head")[2])
    p["height_board"] = _tol(z_head, c["height_bounds"], c["height_margin"], tsk.common, c)
    dense = (p["effort"] * p["still"]) * (p["height_board"] * p["upright"])
    return dense, p


def reward_stair(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    z_head = float(state.body_pos("head")[2])
    for side in ("left", "right"):
        z_foot = float(state.body_pos(f"{side}_foot")[2])
        p[f"vertical_foot_{side}"] = _tol(z_head - z_foot, c["foot_bounds"], c["foot_margin"], tsk.common, c)
    p["move"] = _tol(state.pelvis_frame_vel[0], c["move_bounds"], c["move_margin"], tsk.common, c)
    p["upright_band"] = _tol(state.z_proj, c["upright_bounds"], c["upright_margin"], tsk.common, c)
    dense = (p["effort"] * p["move"] * p["upright_band"]
             * (p["vertical_foot_left"] * p["vertical_foot_right"]))
    return dense, p


def _collision_factor(tsk, state, class_key):
    """0.1-style penalty factor when a robot geom touches the obstacle class."""
    obstacles = set(tsk.scene.obstacle_classes.get(tsk.constants[class_key], ()))
    robot = set(tsk.robot.geoms)
    hit = any((c.geom_a in robot and c.geom_b in obstacles)
              or (c.geom_b in robot and c.geom_a in obstacles)
              for c in state.contacts)
    return tsk.constants["collision_penalty"] if hit else 1.0


def reward_pole(tsk, state, action, episode):
    c = tsk.constants
    p = _walk_like(tsk, state, action)
    p["collision"] = _collision_factor(tsk, state, "obstacle_class")
    dense = p["collision"] * (c["stable_weight"] * p["stable"] + c["move_weight"] * p["move"])
    return dense, p


def reward_reach(tsk, state, action, episode):
    c = tsk.constants
    p = {}
    d_hand = _dist(state.site(c["hand_site"]), state.site(c["target_site"]))
    v = state.linvel("pelvis")
    p["motion_penalty"] = float(np.dot(v, v))
    p["health"] = c["health_scale"] * state.z_proj
    p["close"] = c["close_bonus"] if d_hand < c["close_threshold"] else 0.0
    p["success"] = c["success_bonus"] if d_hand < c["success_threshold"] else 0.0
    p["hand_distance"] = d_hand
    dense = (-c["motion_penalty_scale"] * p["motion_penalty"] + p["health"]
             + p["close"] + p["success"])
    return dense, p


def reward_hurdle(tsk, state, action, episode):
    p = _walk_like(tsk, state, action)
    p["collision"] = _collision_factor(tsk, state, "obstacle_class")
    dense = p["stable"] * p["move"] * p["collision"]
    return dense, p


def reward_crawl(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    z_head = float(state.body_pos("head")[2])
    imu = state.site("imu")
    p["height_crawl"] = _tol(z_head, c["band_bounds"], c["band_margin"], tsk.common, c)
    p["height_imu"] = _tol(float(imu[2]), c["band_bounds"], c["band_margin"], tsk.common, c)
    quat_err = float(np.linalg.norm(state.body_quat("pelvis") - np.asarray(c["quat_crawl"])))
    p["orientation"] = _tol(quat_err, (0.0, 0.0), c["orientation_margin"], tsk.common, c)
    p["tunnel"] = _tol(float(imu[1]), c["tunnel_bounds"], c["tunnel_margin"], tsk.common, c)
    p["speed"] = _tol(state.pelvis_frame_vel[0], c["move_bounds"], c["move_margin"], tsk.common, c)
    dense = p["tunnel"] * (c["w_effort"] * p["effort"]
                           + c["w_height"] * min(p["height_crawl"], p["height_imu"])
                           + c["w_orientation"] * p["orientation"]
                           + c["w_speed"] * p["speed"])
    return dense, p


def reward_maze(tsk, state, action, episode):
    episode = _require_episode(episode, tsk.id)
    c = tsk.constants
    stages = tsk.stages
    p = T.posture_terms(state, action, tsk.common)
    idx = min(episode.checkpoint_index, len(stages["checkpoints"]) - 1)
    checkpoint = np.asarray(stages["checkpoints"][idx], dtype=np.float64)
    vt = stages["v_targets"][idx]
    moves = []
    for axis, target in enumerate(vt):
        moves.append(_tol(state.pelvis_frame_vel[axis] - target, (0.0, 0.0),
                          abs(target), tsk.common, c))
    p["move"] = moves[0] * moves[1]
    p["proximity"] = _tol(_dist(checkpoint, state.body_pos("pelvis")), (0.0, 0.0),
                          c["proximity_margin"], tsk.common, c)
    p["collision"] = _collision_factor(tsk, state, "obstacle_class")
    dense = (c["w_stable"] * p["stable"] + c["w_move"] * p["move"]
             + c["w_proximity"] * p["proximity"]) * p["collision"]
    return dense, p


# ---------------------------------------------------------------------------
# manipulation programs


def reward_push(tsk, state, action, episode):
    c = tsk.constants
    p = {}
    d_goal = _dist(state.body_pos(c["object"]), state.site(c["destination_site"]))
    d_hand = _dist(state.body_pos(c["object"]), state.site(c["hand_site"]))
    p["goal_distance"] = d_goal
    p["hand_distance"] = d_hand
    p["success"] = 1.0 if d_goal < c["success_threshold"] else 0.0
    dense = (c["alpha_success"] * p["success"] - c["alpha_target"] * d_goal
             - c["alpha_hand"] * d_hand)
    return dense, p


def _cabinet_destination(tsk, state, z_center):
    c = tsk.constants
    cube = state.body_pos(c["cube_body"])
    dx = _tol(float(cube[0]) - c["dest_x_center"], c["dest_x_bounds"], c["dest_xy_margin"], tsk.common, c)
    dy = _tol(float(cube[1]), c["dest_y_bounds"], c["dest_xy_margin"], tsk.common, c)
    dz = _tol(float(cube[2]) - z_center, c["dest_z_bounds"], c["dest_z_margin"], tsk.common, c)
    return c["w_xy"] * 0.5 * (dx + dy) + c["w_z"] * dz


def reward_cabinet(tsk, state, action, episode):
    episode = _require_episode(episode, tsk.id)
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    stage = min(episode.stage, 3)
    p["stage"] = float(stage)
    if stage == 0:
        l = state.joint_pos[tsk.scene_joint_qpos_index(c["slide_joint"])]
        task_term = abs(l / c["slide_range"])
    elif stage == 1:
        l = state.joint_pos[tsk.scene_joint_qpos_index(c["drawer_joint"])]
        task_term = abs(l / c["drawer_range"])
    elif stage == 2:
        al = state.joint_pos[tsk.scene_joint_qpos_index(c["hinge_left"])]
        ar = state.joint_pos[tsk.scene_joint_qpos_index(c["hinge_right"])]
        opening = max(min(1.0, abs(al)), min(1.0, abs(ar)))
        task_term = c["w_open"] * opening + c["w_dest"] * _cabinet_destination(tsk, state, c["dest_z3_center"])
    else:
        ap = state.joint_pos[tsk.scene_joint_qpos_index(c["pull_joint"])]
        opening = min(1.0, abs(ap))
        task_term = c["w_open"] * opening + c["w_dest"] * _cabinet_destination(tsk, state, c["dest_z4_center"])
    p["task"] = task_term
    dense = c["w_stable"] * p["stable"] + c["w_task"] * task_term
    return dense, p


def reward_highbar(tsk, state, action, episode):
    c = tsk.constants
    p = {}
    p["upright_inverted"] = _tol(state.z_proj, c["upright_bounds"], c["upright_margin"], tsk.common, c)
    z_feet = 0.5 * (float(state.body_pos("left_foot")[2]) + float(state.body_pos("right_foot")[2]))
    p["feet"] = _tol(z_feet, c["feet_bounds"], c["feet_margin"], tsk.common, c)
    p["effort"] = T.effort_term(action, tsk.common["effort"]["margin"],
                                tsk.common["tolerance"]["value_at_margin"])
    dense = p["upright_inverted"] * p["feet"] * p["effort"]
    return dense, p


def reward_door(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    q_door = state.joint_pos[tsk.scene_joint_qpos_index(c["hinge_joint"])]
    q_hatch = state.joint_pos[tsk.scene_joint_qpos_index(c["hatch_joint"])]
    p["open_door"] = min(1.0, float(q_door) ** 2)
    p["open_hatch"] = _tol(float(q_hatch), c["hatch_bounds"], c["hatch_margin"], tsk.common, c)
    door = state.body_pos(c["door_body"])
    d = min(_dist(state.site("left_hand"), door), _dist(state.site("right_hand"), door))
    p["proximity"] = _tol(d, c["proximity_bounds"], c["proximity_margin"], tsk.common, c)
    p["passage"] = _tol(float(state.site("imu")[0]), c["passage_bounds"], c["passage_margin"], tsk.common, c)
    dense = (c["w_stable"] * p["stable"] + c["w_door"] * p["open_door"]
             + c["w_hatch"] * p["open_hatch"] + c["w_proximity"] * p["proximity"]
             + c["w_passage"] * p["passage"])
    return dense, p


def reward_truck(tsk, state, action, episode):
    episode = _require_episode(episode, tsk.id)
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    pelvis = state.body_pos("pelvis")
    table = state.body_pos(c["table_body"])
    groups = {"truck": [], "picked": [], "table": []}
    for name, cat in zip(c["packages"], episode.package_categories):
        groups[cat].append(name)

    def category_term(names, anchor):
        if not names:
            return 0.0  # empty category contributes nothing
        dmin = min(_dist(state.body_pos(n), anchor) for n in names)
        return _tol(dmin, c["category_bounds"], c["category_margin"], tsk.common, c)

    p["truck"] = category_term(groups["truck"], pelvis)
    p["picked"] = category_term(groups["picked"], pelvis)
    p["table"] = category_term(groups["table"], table)
    p["location"] = c["location_scale"] * (len(groups["table"]) + len(groups["picked"])
                                           - len(groups["truck"]))
    dense = p["location"] + p["upright"] * (1.0 + p["truck"] + p["picked"] + p["table"])
    return dense, p


def reward_cube(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    target = state.body_quat(c["target_body"])
    diffs = []
    for cube in (c["left_cube"], c["right_cube"]):
        dq = state.body_quat(cube) - target
        diffs.append(float(np.mean(dq * dq)))
    orientation = 0.5 * (diffs[0] + diffs[1])
    if c.get("orientation_as_tolerance"):
        orientation = _tol(orientation, (0.0, 0.0), 1.0, tsk.common, c)
    p["orientation"] = orientation
    prox = []
    for cube, hand in ((c["left_cube"], "left_hand"), (c["right_cube"], "right_hand")):
        prox.append(_tol(_dist(state.body_pos(cube), state.site(hand)), (0.0, 0.0),
                         c["proximity_margin"], tsk.common, c))
    p["proximity"] = 0.5 * (prox[0] + prox[1])
    dense = (c["w_posture"] * (p["stable"] * p["still"])
             + c["w_orientation"] * p["orientation"] + c["w_proximity"] * p["proximity"])
    return dense, p


def reward_bookshelf(tsk, state, action, episode):
    episode = _require_episode(episode, tsk.id)
    c = tsk.constants
    stages = tsk.stages
    p = T.posture_terms(state, action, tsk.common)
    idx = min(episode.stage, len(stages["objects"]) - 1)
    pair = episode.subtask_order[idx]
    obj = state.body_pos(stages["objects"][pair])
    dest = state.site(stages["destinations"][pair])
    p["subtask"] = float(idx)
    p["proximity_destination"] = _tol(_dist(obj, dest), c["dest_bounds"], c["dest_margin"], tsk.common, c)
    d_hand = min(_dist(obj, state.site("left_hand")), _dist(obj, state.site("right_hand")))
    p["proximity_hand"] = math.exp(-d_hand)
    dense = (c["w_hand"] * p["proximity_hand"] + c["w_stable"] * p["stable"]
             + c["w_dest"] * p["proximity_destination"])
    return dense, p


def reward_basketball(tsk, state, action, episode):
    episode = _require_episode(episode, tsk.id)
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    ball = state.body_pos(c["ball"])
    dmax = max(_dist(ball, state.site("left_hand")), _dist(ball, state.site("right_hand")))
    p["proximity_hand"] = _tol(dmax, c["prox_bounds"], c["prox_margin"], tsk.common, c)
    p["stage"] = float(episode.stage)
    if episode.stage == 0:  # catch
        dense = c["catch_w_prox"] * p["proximity_hand"] + c["catch_w_stable"] * p["stable"]
    else:  # throw
        p["aim"] = _tol(_dist(ball, state.site(c["basket_site"])), (0.0, 0.0),
                        c["aim_margin"], tsk.common, c)
        dense = (c["throw_w_prox"] * p["proximity_hand"]
                 + c["throw_w_stable"] * p["stable"] + c["throw_w_aim"] * p["aim"])
    return dense, p


def reward_window(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    tool = state.body_pos(c["tool_body"])
    prox = 0.5 * (_tol(_dist(tool, state.site("left_hand")), (0.0, 0.0), c["proximity_margin"], tsk.common, c)
                  + _tol(_dist(tool, state.site("right_hand")), (0.0, 0.0), c["proximity_margin"], tsk.common, c))
    p["proximity_tool"] = prox
    d_win = _dist(state.body_pos("head"), state.body_pos(c["window_body"]))
    p["window_distance"] = _tol(d_win, c["window_bounds"], c["window_margin"], tsk.common, c)
    v_wipe = abs(float(state.linvel(c["tool_body"])[2]))
    p["move_wipe"] = _tol(v_wipe, c["wipe_bounds"], c["wipe_margin"], tsk.common, c)
    p["manipulation"] = (c["w_move"] * p["move_wipe"] + c["w_prox"] * prox
                         + c["w_window"] * (p["stable"] * p["window_distance"]))
    contact = 0.0
    for s in c["wipe_sites"]:
        contact += _tol(float(state.site(s)[0]), c["contact_bounds"], c["contact_margin"], tsk.common, c)
    p["contact"] = contact / len(c["wipe_sites"])
    dense = c["w_manipulation"] * p["manipulation"] + c["w_contact"] * p["contact"]
    return dense, p


def spoon_destination(tsk, state) -> np.ndarray:
    c = tsk.constants
    pot = state.body_pos(c["pot_body"])
    phase = c["phase_step"] * state.step_index
    return np.array([pot[0] + c["circle_radius"] * math.cos(phase),
                     pot[1] + c["circle_radius"] * math.sin(phase),
                     pot[2]])


def reward_spoon(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    spoon = state.body_pos(c["tool_body"])
    prox = 0.5 * (_tol(_dist(spoon, state.site("left_hand")), (0.0, 0.0), c["proximity_margin"], tsk.common, c)
                  + _tol(_dist(spoon, state.site("right_hand")), (0.0, 0.0), c["proximity_margin"], tsk.common, c))
    p["proximity_tool"] = prox
    dest = spoon_destination(tsk, state)
    p["trajectory"] = _tol(_dist(spoon, dest), (0.0, 0.0), c["trajectory_margin"], tsk.common, c)
    pot = state.body_pos(c["pot_body"])
    half = c["pot_half_extents"]
    inside = sum(1.0 for axis in range(3) if abs(float(spoon[axis] - pot[axis])) <= half[axis])
    p["destination"] = inside / 3.0
    dense = (c["w_stable"] * p["stable"] + c["w_prox"] * prox
             + c["w_dest"] * p["destination"] + c["w_traj"] * p["trajectory"])
    return dense, p


def reward_kitchen(tsk, state, action, episode):
    return 0.0, {}


def reward_package(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    pkg = state.body_pos(c["object"])
    d_goal = _dist(pkg, state.site(c["destination_site"]))
    d_hand = _dist(pkg, state.site("left_hand")) + _dist(pkg, state.site("right_hand"))
    p["goal_distance"] = d_goal
    p["hand_distance"] = d_hand
    p["package_height"] = min(c["height_cap"], float(pkg[2]))
    p["success"] = 1.0 if d_goal < c["success_threshold"] else 0.0
    dense = (-c["dist_scale"] * d_goal - c["hand_scale"] * d_hand + p["stable"]
             + p["package_height"] + c["success_bonus"] * p["success"])
    return dense, p


def reward_powerlift(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    z = float(state.body_pos(c["barbell_body"])[2])
    p["barbell_height"] = _tol(z, c["barbell_bounds"], c["barbell_margin"], tsk.common, c)
    dense = c["w_stable"] * p["stable"] + c["w_height"] * p["barbell_height"]
    return dense, p


def reward_room(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)
    pts = np.array([state.body_pos(o) for o in c["objects"]])
    if pts.shape[0] < 2:
        spread = 0.0
    else:
        spread = max(float(np.var(pts[:, 0])), float(np.var(pts[:, 1])))
    p["cleanness"] = _tol(spread, (0.0, 0.0), c["clean_margin"], tsk.common, c)
    dense = c["w_stable"] * p["stable"] + c["w_clean"] * p["cleanness"]
    return dense, p


def reward_insert(tsk, state, action, episode):
    c = tsk.constants
    p = T.posture_terms(state, action, tsk.common)

    def prox(a, b):
        return _tol(_dist(a, b), (0.0, 0.0), c["proximity_margin"], tsk.common, c)

    peg_a = state.body_pos(c["peg_a"])
    peg_b = state.body_pos(c["peg_b"])
    p["proximity_block"] = 0.5 * (prox(peg_a, state.site(c["end_a"]))
                                  + prox(peg_b, state.site(c["end_b"])))

    def peg_height(peg):
        return _tol(float(peg[2]) - c["height_offset"], (0.0, 0.0), c["height_margin"], tsk.common, c)

    p["height_pegs"] = 0.5 * (peg_height(peg_a) + peg_height(peg_b))
    p["proximity_hands"] = 0.5 * (prox(peg_a, state.site("left_hand"))
                                  + prox(peg_b, state.site("right_hand")))
    dense = ((c["w_stable"] * p["stable"] + c["w_block"] * p["proximity_block"])
             * (c["w_height"] * p["height_pegs"] + c["w_hands"] * p["proximity_hands"]))
    return dense, p


PROGRAMS = {
    "walk": reward_walk,
    "stand": reward_stand,
    "run": reward_run,
    "sit": reward_sit,
    "balance": reward_balance,
    "stair": reward_stair,
    "pole": reward_pole,
    "reach": reward_reach,
    "hurdle": reward_hurdle,
    "crawl": reward_crawl,
    "maze": reward_maze,
    "push": reward_push,
    "cabinet": reward_cabinet,
    "highbar": reward_highbar,
    "door": reward_door,
    "truck": reward_truck,
    "cube": reward_cube,
    "bookshelf": reward_bookshelf,
    "basketball": reward_basketball,
    "window": reward_window,
    "spoon": reward_spoon,
    "kitchen": reward_kitchen,
    "package": reward_package,
    "powerlift": reward_powerlift,
    "room": reward_room,
    "insert": reward_insert,
}


def compute_reward(task: TaskSpec, state, action: np.ndarray, episode=None,
                   sparse_bonus: float = 0.0) -> RewardBreakdown:
    """Evaluate the task's dense reward; sparse bonuses come from the episode machine."""
    try:
        program = PROGRAMS[task.program]
    except KeyError:
        raise UnknownTaskError(f"no reward program {task.program!r}") from None
    dense, term_map = program(task, state, np.asarray(action, dtype=np.float64), episode)
    return RewardBreakdown.make(float(dense), float(sparse_bonus), term_map)

#!/usr/bin/env python3
"""Regenerate the shipped robot/task config files.

The YAML files under src/humanoid_suite/configs are the source of truth at
runtime; this script exists so the 31 task files stay structurally consistent
when edited. Run from the repo root:

    python tools/gen_configs.py
"""

import math
from pathlib import Path

import yaml

OUT = Path(__file__).resolve().parent.parent / "src" / "humanoid_suite" / "configs"

INF = "inf"
NEG_INF = "-inf"


def dump(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        yaml.safe_dump(data, fh, sort_keys=False, default_flow_style=None, width=100)


# ---------------------------------------------------------------------------
# robots


BODY_JOINTS = [
    ("left_hip_yaw", -0.43, 0.43), ("left_hip_roll", -0.43, 0.43),
    ("left_hip_pitch", -3.14, 2.53), ("left_knee", -0.26, 2.05),
    ("left_ankle", -0.87, 0.52),
    ("right_hip_yaw", -0.43, 0.43), ("right_hip_roll", -0.43, 0.43),
    ("right_hip_pitch", -3.14, 2.53), ("right_knee", -0.26, 2.05),
    ("right_ankle", -0.87, 0.52),
    ("torso", -2.35, 2.35),
    ("left_shoulder_pitch", -2.87, 2.87), ("left_shoulder_roll", -0.34, 3.11),
    ("left_shoulder_yaw", -1.3, 4.45), ("left_elbow", -1.25, 2.61),
    ("right_shoulder_pitch", -2.87, 2.87), ("right_shoulder_roll", -3.11, 0.34),
    ("right_shoulder_yaw", -4.45, 1.3), ("right_elbow", -1.25, 2.61),
]

# 22 finger hinges per hand; the last one is a passive coupled distal joint
HAND_FINGER_COUNT = 22
HAND_ACTUATED = 21


def hand_joints(side: str):
    return [{"name": f"{side}_finger_{i:02d}", "range": [-0.3, 1.57], "home": 0.0}
            for i in range(HAND_FINGER_COUNT)]


def robot_config(with_hands: bool) -> dict:
    body = [{"name": n, "range": [lo, hi], "home": 0.0} for n, lo, hi in BODY_JOINTS]
    actuated = [j["name"] for j in body]
    hands = {}
    if with_hands:
        hands = {"left": hand_joints("left"), "right": hand_joints("right")}
        for side in ("left", "right"):
            actuated += [f"{side}_finger_{i:02d}" for i in range(HAND_ACTUATED)]
    return {
        "name": "full" if with_hands else "no_hands",
        "root": {"body": "pelvis", "pos": [0.0, 0.0, 0.98], "quat": [1.0, 0.0, 0.0, 0.0]},
        "bodies": {
            "pelvis": [0.0, 0.0, 0.0],
            "torso": [0.0, 0.0, 0.25],
            "head": [0.0, 0.0, 0.70],
            "left_foot": [0.0, 0.12, -0.93],
            "right_foot": [0.0, -0.12, -0.93],
        },
        "sites": {
            "imu": [0.0, 0.0, 0.25],
            "left_hand": [0.25, 0.25, 0.0],
            "right_hand": [0.25, -0.25, 0.0],
        },
        "hand_jacobian": {
            "left": {
                "joints": ["left_shoulder_pitch", "left_shoulder_roll",
                           "left_shoulder_yaw", "left_elbow"],
                "matrix": [[0.35, 0.0, 0.05, 0.25],
                           [0.0, 0.30, 0.10, 0.0],
                           [-0.40, 0.05, 0.0, -0.20]],
            },
            "right": {
                "joints": ["right_shoulder_pitch", "right_shoulder_roll",
                           "right_shoulder_yaw", "right_elbow"],
                "matrix": [[0.35, 0.0, -0.05, 0.25],
                           [0.0, -0.30, 0.10, 0.0],
                           [-0.40, -0.05, 0.0, -0.20]],
            },
        },
        "body_joints": body,
        "hand_joints": hands,
        "actuated": actuated,
        "geoms": ["robot_pelvis_geom", "robot_torso_geom", "robot_head_geom",
                  "robot_left_foot_geom", "robot_right_foot_geom",
                  "robot_left_hand_geom", "robot_right_hand_geom"],
    }


COMMON = {
    "tolerance": {"value_at_margin": 0.1, "sigmoid": "gaussian"},
    "height": {"bounds": [1.65, INF], "margin": 0.4125},
    "upright": {"bounds": [0.9, INF], "margin": 1.9},
    "effort": {"margin": 10.0},
    "still": {"margin": 2.0},
    "control": {"frequency_hz": 50.0, "substep_dt": 0.002, "substeps": 10},
}


# ---------------------------------------------------------------------------
# task helpers


def seg(name, source, length):
    return {"name": name, "source": source, "len": length}


def obj_segments(name, pose=False):
    if pose:
        return [seg(f"{name}_pose", f"body_pose:{name}", 7),
                seg(f"{name}_vel", f"body_vel:{name}", 3)]
    return [seg(f"{name}_pos", f"body_pos:{name}", 3),
            seg(f"{name}_vel", f"body_vel:{name}", 3)]


def base_task(tid, family, cap, target, program=None, robot="full"):
    return {
        "id": tid,
        "family": family,
        "program": program or tid,
        "episode_cap": cap,
        "success_target": target,
        "robot": robot,
        "constants": {},
        "termination": {},
        "stages": {},
        "init": {"joint_noise": 0.01, "recipes": []},
        "observation": {"segments": []},
        "scene": {"mjcf": f"scenes/{tid}.xml", "bodies": {}, "sites": {},
                  "objects": {}, "joints": [], "obstacle_classes": {}},
    }


def build_tasks() -> dict:
    tasks = {}

    t = base_task("walk", "locomotion", 1000, 700.0)
    t["constants"] = {"move_bounds": [1.0, INF], "move_margin": 1.0}
    t["termination"] = {"pelvis_below": 0.2}
    tasks["walk"] = t

    t = base_task("stand", "locomotion", 1000, 800.0)
    t["termination"] = {"pelvis_below": 0.2}
    tasks["stand"] = t

    t = base_task("run", "locomotion", 1000, 700.0)
    t["constants"] = {"move_bounds": [5.0, INF], "move_margin": 5.0}
    t["termination"] = {"pelvis_below": 0.2}
    tasks["run"] = t

    for tid in ("sit_simple", "sit_hard"):
        t = base_task(tid, "locomotion", 1000, 750.0, program="sit")
        t["constants"] = {
            "sitting_x_bounds": [-0.19, 0.19], "sitting_x_margin": 0.2,
            "sitting_y_bounds": [0.0, 0.0], "sitting_y_margin": 0.1,
            "sitting_z_bounds": [0.68, 0.72], "sitting_z_margin": 0.2,
            "posture_bounds": [0.35, 0.45], "posture_margin": 0.3,
            "chair_body": "chair",
        }
        t["termination"] = {"pelvis_below": 0.5}
        t["scene"]["bodies"]["chair"] = [-0.3, 0.0, 0.35, 1.0, 0.0, 0.0, 0.0]
        if tid == "sit_hard":
            t["init"]["recipes"] = [{"recipe": "sample_root_pose",
                                     "yaw_range": [-1.8, 1.8],
                                     "x_range": [0.2, 0.4],
                                     "y_range": [-0.15, 0.15]}]
            t["observation"]["segments"] = [seg("chair_pose", "body_pose:chair", 7)]
        tasks[tid] = t

    for tid in ("balance_simple", "balance_hard"):
        t = base_task(tid, "locomotion", 1000, 800.0, program="balance")
        t["constants"] = {"height_bounds": [2.15, INF], "height_margin": 0.4125}
        t["termination"] = {
            "pelvis_below": 0.8,
            "collision_rules": [
                {"kind": "only_allowed", "geom": "balance_sphere_geom",
                 "allowed": ["floor", "balance_board_geom"]},
                {"kind": "forbidden_pair", "geoms": ["balance_board_geom", "floor"]},
            ],
        }
        t["scene"]["robot_root_pos"] = [0.0, 0.0, 1.5]
        t["scene"]["objects"] = {
            "board": {"pos": [0.0, 0.0, 0.45], "gravity": False, "radius": 0.05,
                      "geom": "balance_board_geom"},
            "sphere": {"pos": [0.0, 0.0, 0.2], "gravity": False, "radius": 0.2,
                       "geom": "balance_sphere_geom", "moving_pivot": tid == "balance_hard"},
        }
        t["observation"]["segments"] = [seg("board_pose", "body_pose:board", 7),
                                        seg("board_vel", "body_vel:board", 3)]
        tasks[tid] = t

    for tid in ("stair", "slide"):
        t = base_task(tid, "locomotion", 1000, 700.0, program="stair")
        t["constants"] = {
            "foot_bounds": [1.2, INF], "foot_margin": 0.45,
            "move_bounds": [1.0, INF], "move_margin": 1.0,
            "upright_bounds": [0.5, 1.0], "upright_margin": 1.9,
        }
        t["termination"] = {"zproj_below": 0.1 if tid == "stair" else 0.6}
        tasks[tid] = t

    t = base_task("pole", "locomotion", 1000, 700.0)
    t["constants"] = {"collision_penalty": 0.1, "move_bounds": [1.0, INF],
                      "move_margin": 1.0, "stable_weight": 0.5, "move_weight": 0.5,
                      "obstacle_class": "pole"}
    t["termination"] = {"pelvis_below": 0.6}
    t["scene"]["obstacle_classes"] = {"pole": ["pole_geom_0", "pole_geom_1", "pole_geom_2"]}
    tasks["pole"] = t

    t = base_task("reach", "locomotion", 1000, 12000.0)
    t["constants"] = {
        "motion_penalty_scale": 1.0e-4, "health_scale": 5.0,
        "close_threshold": 1.0, "close_bonus": 5.0,
        "success_threshold": 0.05, "success_bonus": 10.0,
        "hand_site": "left_hand", "target_site": "reach_target",
    }
    t["init"]["recipes"] = [{"recipe": "sample_site", "site": "reach_target",
                             "low": [0.0, -0.6, 0.6], "high": [0.8, 0.6, 1.6]}]
    t["init"]["perturbation"] = {"enabled": False, "magnitude": 50.0,
                                 "bodies": ["pelvis", "torso", "head"]}
    t["scene"]["sites"]["reach_target"] = {"pos": [0.4, 0.2, 1.0]}
    t["observation"]["segments"] = [seg("left_hand_pos", "site:left_hand", 3),
                                    seg("target_pos", "site:reach_target", 3)]
    t["respawn_targets"] = False
    tasks["reach"] = t

    t = base_task("hurdle", "locomotion", 1000, 700.0)
    t["constants"] = {"collision_penalty": 0.1, "move_bounds": [5.0, INF],
                      "move_margin": 5.0, "obstacle_class": "wall"}
    t["scene"]["obstacle_classes"] = {"wall": ["hurdle_geom_0", "hurdle_geom_1"]}
    tasks["hurdle"] = t

    t = base_task("crawl", "locomotion", 1000, 700.0)
    t["constants"] = {
        "band_bounds": [0.6, 1.0], "band_margin": 1.0,
        "quat_crawl": [0.75, 0.0, 0.65, 0.0], "orientation_margin": 1.0,
        "tunnel_bounds": [-1.0, 1.0], "tunnel_margin": 0.0,
        "move_bounds": [1.0, INF], "move_margin": 1.0,
        "w_effort": 0.1, "w_height": 0.25, "w_orientation": 0.25, "w_speed": 0.4,
    }
    tasks["crawl"] = t

    t = base_task("maze", "locomotion", 1000, 1200.0)
    t["constants"] = {"w_stable": 0.2, "w_move": 0.4, "w_proximity": 0.4,
                      "proximity_margin": 1.0, "collision_penalty": 0.1,
                      "obstacle_class": "wall"}
    t["termination"] = {"pelvis_below": 0.2}
    t["stages"] = {
        "checkpoints": [[3.0, 0.0, 0.98], [3.0, 3.0, 0.98],
                        [6.0, 3.0, 0.98], [6.0, 6.0, 0.98]],
        "v_targets": [[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]],
        "radius": 0.5, "bonus_scale": 100.0,
    }
    t["scene"]["obstacle_classes"] = {"wall": ["maze_wall_geom"]}
    tasks["maze"] = t

    t = base_task("push", "manipulation", 500, 700.0)
    t["constants"] = {"alpha_success": 1000.0, "alpha_target": 1.0, "alpha_hand": 0.1,
                      "success_threshold": 0.05, "object": "box",
                      "destination_site": "box_destination", "hand_site": "left_hand"}
    t["termination"] = {"success": {"kind": "distance_below", "a": "body:box",
                                    "b": "site:box_destination", "threshold": 0.05}}
    t["init"]["recipes"] = [
        {"recipe": "sample_object_pos", "object": "box",
         "low": [0.3, -0.3, 0.95], "high": [0.7, 0.3, 0.95]},
        {"recipe": "sample_site", "site": "box_destination",
         "low": [0.3, -0.3, 0.95], "high": [0.7, 0.3, 0.95]},
    ]
    t["scene"]["objects"]["box"] = {"pos": [0.5, 0.0, 0.95], "gravity": False,
                                    "radius": 0.05, "geom": "box_geom"}
    t["scene"]["sites"]["box_destination"] = {"pos": [0.55, 0.1, 0.95]}
    t["observation"]["segments"] = [
        seg("left_hand_pos", "site:left_hand", 3),
        seg("box_destination", "site:box_destination", 3),
        seg("box_pos", "body_pos:box", 3),
        seg("box_vel", "body_vel:box", 3),
    ]
    tasks["push"] = t

    t = base_task("cabinet", "manipulation", 1000, 2500.0)
    t["constants"] = {
        "w_stable": 0.2, "w_task": 0.8,
        "slide_joint": "cabinet_slide", "slide_range": 0.4,
        "drawer_joint": "cabinet_drawer", "drawer_range": 0.45,
        "hinge_left": "cabinet_hinge_left", "hinge_right": "cabinet_hinge_right",
        "pull_joint": "cabinet_pull", "cube_body": "cabinet_cube",
        "dest_x_center": 0.9, "dest_x_bounds": [-0.3, 0.3],
        "dest_y_bounds": [-0.6, 0.6], "dest_xy_margin": 0.3,
        "dest_z_bounds": [-0.15, 0.15], "dest_z_margin": 0.3,
        "dest_z3_center": 0.94, "dest_z4_center": 1.54,
        "w_xy": 0.3, "w_z": 0.7, "w_open": 0.5, "w_dest": 0.5,
    }
    t["termination"] = {"success": {"kind": "all_subtasks"}}
    t["stages"] = {
        "all_done_bonus": 1000.0,
        "subtasks": [
            {"kind": "joint_at_least", "joint": "cabinet_slide", "value": 0.4, "bonus": 100.0},
            {"kind": "joint_at_least", "joint": "cabinet_drawer", "value": 0.45, "bonus": 200.0},
            {"kind": "body_in_box", "body": "cabinet_cube", "x_center": 0.9, "x_half": 0.3,
             "y_center": 0.0, "y_half": 0.6, "z_center": 0.94, "z_half": 0.15, "bonus": 300.0},
            {"kind": "body_in_box", "body": "cabinet_cube", "x_center": 0.9, "x_half": 0.3,
             "y_center": 0.0, "y_half": 0.6, "z_center": 1.54, "z_half": 0.15, "bonus": 400.0},
        ],
    }
    t["scene"]["joints"] = [
        {"name": "cabinet_slide", "range": [0.0, 0.4], "home": 0.0},
        {"name": "cabinet_drawer", "range": [0.0, 0.45], "home": 0.0},
        {"name": "cabinet_hinge_left", "range": [0.0, 1.57], "home": 0.0},
        {"name": "cabinet_hinge_right", "range": [0.0, 1.57], "home": 0.0},
        {"name": "cabinet_pull", "range": [0.0, 1.57], "home": 0.0},
    ]
    t["scene"]["objects"]["cabinet_cube"] = {"pos": [0.6, 0.0, 0.4], "gravity": False,
                                             "radius": 0.03, "geom": "cabinet_cube_geom"}
    t["observation"]["segments"] = (
        [seg(f"{j}_pos", f"joint_pos:{j}", 1) for j in
         ("cabinet_slide", "cabinet_drawer", "cabinet_hinge_left",
          "cabinet_hinge_right", "cabinet_pull")]
        + [seg(f"{j}_vel", f"joint_vel:{j}", 1) for j in
           ("cabinet_slide", "cabinet_drawer", "cabinet_hinge_left",
            "cabinet_hinge_right", "cabinet_pull")]
        + obj_segments("cabinet_cube"))
    tasks["cabinet"] = t

    t = base_task("highbar", "manipulation", 1000, 750.0)
    t["constants"] = {"upright_bounds": [NEG_INF, -0.9], "upright_margin": 1.9,
                      "feet_bounds": [4.8, INF], "feet_margin": 2.0}
    t["termination"] = {"head_below": 2.0}
    t["scene"]["robot_root_pos"] = [0.0, 0.0, 4.0]
    tasks["highbar"] = t

    t = base_task("door", "manipulation", 1000, 600.0)
    t["constants"] = {
        "w_stable": 0.1, "w_door": 0.45, "w_hatch": 0.05, "w_proximity": 0.05,
        "w_passage": 0.35, "hinge_joint": "door_hinge", "hatch_joint": "door_hatch",
        "hatch_bounds": [0.75, 2.0], "hatch_margin": 0.75,
        "proximity_bounds": [0.0, 0.25], "proximity_margin": 1.0,
        "passage_bounds": [1.2, INF], "passage_margin": 1.0, "door_body": "door",
    }
    t["termination"] = {"pelvis_below": 0.58}
    t["scene"]["joints"] = [
        {"name": "door_hinge", "range": [0.0, 1.4], "home": 0.0},
        {"name": "door_hatch", "range": [0.0, 2.0], "home": 0.0},
    ]
    t["scene"]["bodies"]["door"] = [1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0]
    t["observation"]["segments"] = [
        seg("door_hinge_pos", "joint_pos:door_hinge", 1),
        seg("door_hatch_pos", "joint_pos:door_hatch", 1),
        seg("door_hinge_vel", "joint_vel:door_hinge", 1),
        seg("door_hatch_vel", "joint_vel:door_hatch", 1),
    ]
    tasks["door"] = t

    t = base_task("truck", "manipulation", 1000, 3000.0)
    packages = [f"package_{i}" for i in range(4)]
    t["constants"] = {"category_bounds": [0.0, 0.2], "category_margin": 4.0,
                      "location_scale": 100.0, "table_body": "table",
                      "packages": packages}
    t["termination"] = {"success": {"kind": "all_delivered"}}
    t["stages"] = {
        "packages": packages, "all_done_bonus": 1000.0,
        "table_region": {"center": [3.0, 0.0, 0.8], "half": [0.6, 0.9, 0.3]},
        "truck_region": {"center": [-2.5, 0.0, 1.0], "half": [1.2, 1.2, 1.0]},
    }
    t["scene"]["bodies"]["table"] = [3.0, 0.0, 0.8, 1.0, 0.0, 0.0, 0.0]
    for i, p in enumerate(packages):
        t["scene"]["objects"][p] = {"pos": [-2.3 - 0.2 * i, -0.45 + 0.3 * i, 1.0],
                                    "gravity": False, "radius": 0.15, "geom": f"{p}_geom"}
    t["observation"]["segments"] = sum((obj_segments(p) for p in packages), [])
    tasks["truck"] = t

    t = base_task("cube", "manipulation", 500, 370.0)
    t["constants"] = {"w_posture": 0.2, "w_orientation": 0.5, "w_proximity": 0.3,
                      "proximity_margin": 0.5, "orientation_as_tolerance": False,
                      "left_cube": "cube_left", "right_cube": "cube_right",
                      "target_body": "cube_target"}
    t["termination"] = {"pelvis_below": 0.5,
                        "drops": [{"body": "cube_left", "below": 0.5},
                                  {"body": "cube_right", "below": 0.5}]}
    t["init"]["recipes"] = [
        {"recipe": "sample_object_quat", "objects": ["cube_left", "cube_right"]},
        {"recipe": "sample_body_quat", "body": "cube_target"},
    ]
    t["scene"]["bodies"]["cube_target"] = [0.5, 0.0, 1.3, 1.0, 0.0, 0.0, 0.0]
    t["scene"]["objects"] = {
        "cube_left": {"pos": [0.25, 0.25, 1.05], "gravity": False, "radius": 0.035,
                      "geom": "cube_left_geom"},
        "cube_right": {"pos": [0.25, -0.25, 1.05], "gravity": False, "radius": 0.035,
                       "geom": "cube_right_geom"},
    }
    t["observation"]["segments"] = (obj_segments("cube_left", pose=True)
                                    + obj_segments("cube_right", pose=True)
                                    + [seg("target_quat", "body_quat:cube_target", 4)])
    tasks["cube"] = t

    for tid in ("bookshelf_simple", "bookshelf_hard"):
        t = base_task(tid, "manipulation", 1000, 2000.0, program="bookshelf")
        objs = [f"shelf_obj_{i}" for i in range(5)]
        dests = [f"shelf_dest_{i}" for i in range(5)]
        t["constants"] = {"w_hand": 0.4, "w_stable": 0.2, "w_dest": 0.4,
                          "dest_bounds": [0.0, 0.15], "dest_margin": 1.0}
        t["termination"] = {"pelvis_below": 0.58,
                            "drops": [{"body": o, "below": 0.5} for o in objs],
                            "success": {"kind": "all_subtasks"}}
        t["stages"] = {"objects": objs, "destinations": dests,
                       "threshold": 0.15, "bonus_scale": 100.0}
        for i, o in enumerate(objs):
            t["scene"]["objects"][o] = {"pos": [0.55, -0.4 + 0.2 * i, 0.6 + 0.22 * i],
                                        "gravity": False, "radius": 0.04, "geom": f"{o}_geom"}
        for i, d in enumerate(dests):
            t["scene"]["sites"][d] = {"pos": [0.55, 0.4 - 0.2 * i, 0.6 + 0.22 * (4 - i)]}
        if tid == "bookshelf_hard":
            t["init"]["recipes"] = [
                {"recipe": "shuffle_subtask_order", "n": 5},
                {"recipe": "sample_sites", "sites": dests,
                 "low": [0.45, -0.8, 0.4], "high": [0.65, 0.8, 1.6]},
            ]
        t["observation"]["segments"] = (sum((obj_segments(o) for o in objs), [])
                                        + [seg("next_subtask", "episode:next_subtask", 1)])
        tasks[tid] = t

    t = base_task("basketball", "manipulation", 500, 1200.0)
    t["constants"] = {"prox_bounds": [0.0, 0.2], "prox_margin": 1.0, "aim_margin": 7.0,
                      "catch_w_prox": 0.5, "catch_w_stable": 0.5,
                      "throw_w_prox": 0.05, "throw_w_stable": 0.15, "throw_w_aim": 0.8,
                      "ball": "ball", "basket_site": "basket"}
    t["termination"] = {"pelvis_below": 0.5,
                        "drops": [{"body": "ball", "below": 0.5}],
                        "success": {"kind": "distance_below", "a": "body:ball",
                                    "b": "site:basket", "threshold": 0.05}}
    t["stages"] = {"ball": "ball", "ball_geom": "ball_geom", "basket_site": "basket",
                   "success_threshold": 0.05, "success_bonus": 1000.0}
    t["init"]["recipes"] = [
        {"recipe": "basketball_launch", "radius": 1.5, "angle_range": [-1.45, 1.45],
         "flight_time": 0.2, "catch_offset": [0.4, 0.0, 1.2]},
    ]
    t["scene"]["objects"]["ball"] = {"pos": [1.5, 0.0, 0.98], "gravity": True,
                                     "radius": 0.12, "geom": "ball_geom"}
    t["scene"]["sites"]["basket"] = {"pos": [0.0, 2.5, 3.05]}
    t["observation"]["segments"] = obj_segments("ball")
    tasks["basketball"] = t

    t = base_task("window", "manipulation", 1000, 650.0)
    wipe_sites = [f"wipe_s{i}" for i in range(1, 6)]
    t["constants"] = {
        "proximity_margin": 0.5, "window_bounds": [0.4, 0.4], "window_margin": 0.1,
        "wipe_bounds": [0.5, 0.5], "wipe_margin": 0.5,
        "contact_bounds": [0.92, 0.92], "contact_margin": 0.4,
        "w_move": 0.4, "w_prox": 0.4, "w_window": 0.2,
        "w_manipulation": 0.5, "w_contact": 0.5,
        "tool_body": "tool", "window_body": "window", "wipe_sites": wipe_sites,
    }
    t["termination"] = {"pelvis_below": 0.58, "drops": [{"body": "tool", "below": 0.58}]}
    t["scene"]["objects"]["tool"] = {"pos": [0.4, 0.2, 1.0], "gravity": False,
                                     "radius": 0.03, "geom": "tool_geom"}
    t["scene"]["bodies"]["window"] = [0.92, 0.0, 1.3, 1.0, 0.0, 0.0, 0.0]
    offsets = [[0.0, -0.1, 0.1], [0.0, 0.1, 0.1], [0.0, -0.1, -0.1],
               [0.0, 0.1, -0.1], [0.0, 0.0, 0.0]]
    for s, off in zip(wipe_sites, offsets):
        t["scene"]["sites"][s] = {"pos": [0.4, 0.2, 1.0], "attach": "tool", "offset": off}
    t["scene"]["joints"] = [{"name": "wipe_pivot", "range": [-1.57, 1.57], "home": 0.0}]
    t["observation"]["segments"] = (obj_segments("tool", pose=True)
                                    + [seg("wipe_pivot_pos", "joint_pos:wipe_pivot", 1),
                                       seg("wipe_pivot_vel", "joint_vel:wipe_pivot", 1)])
    tasks["window"] = t

    t = base_task("spoon", "manipulation", 1000, 650.0)
    t["constants"] = {
        "proximity_margin": 0.5, "trajectory_margin": 0.15,
        "circle_radius": 0.06, "phase_step": math.pi / 20.0,
        "w_stable": 0.15, "w_prox": 0.25, "w_dest": 0.25, "w_traj": 0.35,
        "tool_body": "spoon", "pot_body": "pot",
        "pot_half_extents": [0.15, 0.15, 0.12],
    }
    t["termination"] = {"pelvis_below": 0.58}
    t["scene"]["objects"]["spoon"] = {"pos": [0.3, 0.3, 0.98], "gravity": False,
                                      "radius": 0.02, "geom": "spoon_geom"}
    t["scene"]["bodies"]["pot"] = [0.5, 0.0, 0.95, 1.0, 0.0, 0.0, 0.0]
    t["scene"]["sites"]["spoon_target"] = {"pos": [0.56, 0.0, 0.95]}
    t["observation"]["segments"] = (obj_segments("spoon")
                                    + [seg("target_pos", "site:spoon_target", 3)])
    tasks["spoon"] = t

    t = base_task("kitchen", "manipulation", 500, 4.0)
    t["stages"] = {"subtasks": [
        {"name": "microwave", "kind": "joint_near", "joint": "microwave_door",
         "goal": 1.4, "threshold": 0.3},
        {"name": "kettle", "kind": "body_near", "body": "kettle",
         "goal": [0.65, -0.1, 0.95], "threshold": 0.3},
        {"name": "burner", "kind": "joint_near", "joint": "burner_knob",
         "goal": 1.2, "threshold": 0.3},
        {"name": "light", "kind": "joint_near", "joint": "light_switch",
         "goal": 1.2, "threshold": 0.3},
    ]}
    t["scene"]["joints"] = [
        {"name": "microwave_door", "range": [0.0, 1.6], "home": 0.0},
        {"name": "burner_knob", "range": [0.0, 1.5], "home": 0.0},
        {"name": "light_switch", "range": [0.0, 1.5], "home": 0.0},
    ]
    t["scene"]["objects"]["kettle"] = {"pos": [0.5, 0.2, 0.95], "gravity": False,
                                       "radius": 0.08, "geom": "kettle_geom"}
    t["observation"]["segments"] = (
        [seg(f"{j}_pos", f"joint_pos:{j}", 1) for j in
         ("microwave_door", "burner_knob", "light_switch")]
        + [seg(f"{j}_vel", f"joint_vel:{j}", 1) for j in
           ("microwave_door", "burner_knob", "light_switch")]
        + obj_segments("kettle"))
    tasks["kitchen"] = t

    t = base_task("package", "manipulation", 1000, 1500.0)
    t["constants"] = {"dist_scale": 3.0, "hand_scale": 0.1, "height_cap": 1.0,
                      "success_threshold": 0.1, "success_bonus": 1000.0,
                      "object": "package", "destination_site": "package_destination"}
    t["termination"] = {"success": {"kind": "distance_below", "a": "body:package",
                                    "b": "site:package_destination", "threshold": 0.1}}
    t["init"]["recipes"] = [
        {"recipe": "sample_object_pos", "object": "package",
         "low": [1.0, -1.0, 0.4], "high": [2.0, 1.0, 0.4]},
        {"recipe": "sample_site", "site": "package_destination",
         "low": [-1.5, -1.0, 0.6], "high": [-0.5, 1.0, 0.9]},
    ]
    t["scene"]["objects"]["package"] = {"pos": [1.5, 0.0, 0.4], "gravity": False,
                                        "radius": 0.15, "geom": "package_geom"}
    t["scene"]["sites"]["package_destination"] = {"pos": [-1.0, 0.5, 0.8]}
    t["observation"]["segments"] = [
        seg("left_hand_pos", "site:left_hand", 3),
        seg("right_hand_pos", "site:right_hand", 3),
        seg("destination", "site:package_destination", 3),
        seg("package_pos", "body_pos:package", 3),
        seg("package_vel", "body_vel:package", 3),
    ]
    tasks["package"] = t

    t = base_task("powerlift", "manipulation", 1000, 800.0)
    t["constants"] = {"w_stable": 0.2, "w_height": 0.8,
                      "barbell_bounds": [1.9, 2.1], "barbell_margin": 2.0,
                      "barbell_body": "barbell"}
    t["termination"] = {"pelvis_below": 0.2}
    t["scene"]["objects"]["barbell"] = {"pos": [0.5, 0.0, 0.25], "gravity": False,
                                        "radius": 0.2, "geom": "barbell_geom"}
    t["observation"]["segments"] = obj_segments("barbell")
    tasks["powerlift"] = t

    t = base_task("room", "manipulation", 1000, 400.0)
    objs = [f"room_obj_{i}" for i in range(5)]
    t["constants"] = {"w_stable": 0.2, "w_clean": 0.8, "clean_margin": 3.0,
                      "objects": objs}
    t["termination"] = {"pelvis_below": 0.3}
    t["init"]["recipes"] = [{"recipe": "scatter_objects", "objects": objs,
                             "low": [-2.5, -2.5, 0.1], "high": [2.5, 2.5, 0.1]}]
    for i, o in enumerate(objs):
        t["scene"]["objects"][o] = {"pos": [-2.0 + i, 1.0 - 0.5 * i, 0.1],
                                    "gravity": False, "radius": 0.06, "geom": f"{o}_geom"}
    t["observation"]["segments"] = sum((obj_segments(o) for o in objs), [])
    tasks["room"] = t

    for tid, size in (("insert_small", 0.03), ("insert_normal", 0.05)):
        t = base_task(tid, "manipulation", 1000, 350.0, program="insert")
        t["constants"] = {"proximity_margin": 0.5, "height_offset": 1.1,
                          "height_margin": 0.15, "w_stable": 0.5, "w_block": 0.5,
                          "w_height": 0.5, "w_hands": 0.5,
                          "peg_a": "peg_a", "peg_b": "peg_b",
                          "end_a": "end_a", "end_b": "end_b"}
        t["termination"] = {"drops": [{"body": "block", "below": 0.5},
                                      {"body": "peg_a", "below": 0.5},
                                      {"body": "peg_b", "below": 0.5}]}
        t["scene"]["objects"] = {
            "block": {"pos": [0.5, 0.0, 0.95], "gravity": False, "radius": size,
                      "geom": "block_geom"},
            "peg_a": {"pos": [0.45, 0.15, 0.95], "gravity": False, "radius": size,
                      "geom": "peg_a_geom"},
            "peg_b": {"pos": [0.45, -0.15, 0.95], "gravity": False, "radius": size,
                      "geom": "peg_b_geom"},
        }
        t["scene"]["sites"]["end_a"] = {"pos": [0.5, 0.15, 0.95], "attach": "block",
                                        "offset": [0.0, 0.15, 0.0]}
        t["scene"]["sites"]["end_b"] = {"pos": [0.5, -0.15, 0.95], "attach": "block",
                                        "offset": [0.0, -0.15, 0.0]}
        t["observation"]["segments"] = (obj_segments("block") + obj_segments("peg_a")
                                        + obj_segments("peg_b"))
        tasks[tid] = t

    return tasks


def main():
    dump(OUT / "common.yaml", COMMON)
    dump(OUT / "robot_full.yaml", robot_config(True))
    dump(OUT / "robot_no_hands.yaml", robot_config(False))
    tasks = build_tasks()
    for tid, cfg in tasks.items():
        dump(OUT / "tasks" / f"{tid}.yaml", cfg)
    print(f"wrote {len(tasks)} task configs to {OUT / 'tasks'}")


if __name__ == "__main__":
    main()

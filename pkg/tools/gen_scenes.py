#!/usr/bin/env python3
"""Generate the MJCF test scenes under assets/scenes/.

These are simplified humanoid scenes for exercising the engine adapter and
the collision-profile FPS harness; the real published robot models can be
dropped in by pointing the task configs at different files. Run from the
repo root:

    python tools/gen_scenes.py
"""

import sys
import xml.etree.ElementTree as ET
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from humanoid_suite.config import load_robot, load_task  # noqa: E402

OUT = Path(__file__).resolve().parent.parent / "assets" / "scenes"

SCENE_TASKS = ["walk", "stand", "run", "reach", "kitchen"]

# chain segments: (parent-relative pos, geom capsule fromto/size)
LEG = [("hip_yaw", [0, 0, -0.1]), ("hip_roll", [0, 0, 0]), ("hip_pitch", [0, 0, 0]),
       ("knee", [0, 0, -0.4]), ("ankle", [0, 0, -0.4])]
ARM = [("shoulder_pitch", [0, 0, 0.35]), ("shoulder_roll", [0, 0, 0]),
       ("shoulder_yaw", [0, -0.05, 0]), ("elbow", [0, 0, -0.25])]


def _el(parent, tag, **attrs):
    return ET.SubElement(parent, tag, {k: _fmt(v) for k, v in attrs.items()})


def _fmt(v):
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return str(v)


def _joint(parent, name, rng, axis=(0, 0, 1)):
    return _el(parent, "joint", name=name, type="hinge", axis=axis,
               range=rng, damping="1", armature="0.01")


def build_robot(root, with_hands: bool, skin: bool = True):
    robot = load_robot("full" if with_hands else "no_hands")
    jr = {j.name: (j.lower, j.upper) for j in robot.body_joints}
    for side in robot.hand_joints:
        for j in robot.hand_joints[side]:
            jr[j.name] = (j.lower, j.upper)

    pelvis = _el(root, "body", name="pelvis", pos=[0, 0, 0.98])
    _el(pelvis, "freejoint", name="root")
    _el(pelvis, "geom", name="robot_pelvis_geom", type="sphere", size="0.12",
        mass="8", rgba="0.3 0.3 0.8 1")

    for side, sign in (("left", 1), ("right", -1)):
        parent = pelvis
        for i, (suffix, pos) in enumerate(LEG):
            pos = [pos[0], sign * 0.12 if i == 0 else pos[1], pos[2]]
            body = _el(parent, "body", name=f"robot_{side}_leg_{i}", pos=pos)
            axis = {"hip_yaw": (0, 0, 1), "hip_roll": (1, 0, 0)}.get(suffix, (0, 1, 0))
            _joint(body, f"{side}_{suffix}", jr[f"{side}_{suffix}"], axis)
            size = "0.05 0.15" if i >= 3 else "0.05"
            gtype = "capsule" if i >= 3 else "sphere"
            extra = {"fromto": [0, 0, 0, 0, 0, -0.35]} if i >= 3 else {}
            _el(body, "geom", name=f"robot_{side}_leg_geom_{i}", type=gtype,
                size="0.05", mass="1.5", **extra)
            parent = body
        foot = _el(parent, "body", name=f"{side}_foot", pos=[0.04, 0, -0.05])
        _el(foot, "geom", name=f"robot_{side}_foot_geom", type="box",
            size=[0.12, 0.05, 0.02], mass="0.8")

    torso = _el(pelvis, "body", name="torso", pos=[0, 0, 0.25])
    _joint(torso, "torso", jr["torso"], (0, 0, 1))
    _el(torso, "geom", name="robot_torso_geom", type="capsule",
        fromto=[0, 0, -0.15, 0, 0, 0.15], size="0.1", mass="10")
    _el(torso, "site", name="imu", pos=[0, 0, 0], size="0.01")
    if skin:
        for i in range(24):
            _el(torso, "geom", name=f"robot_skin_{i:02d}", type="sphere", size="0.035",
                pos=[0.09 * ((i % 4) - 1.5) / 1.5, 0.09 * ((i // 4 % 3) - 1),
                     0.12 * ((i // 12) - 0.5)], mass="0.01", rgba="0.5 0.5 0.5 0.3")

    head = _el(torso, "body", name="head", pos=[0, 0, 0.45])
    _el(head, "geom", name="robot_head_geom", type="sphere", size="0.09", mass="1.5")

    for side, sign in (("left", 1), ("right", -1)):
        parent = torso
        for i, (suffix, pos) in enumerate(ARM):
            pos = [pos[0], sign * 0.22 if i == 0 else pos[1] * sign, pos[2]]
            body = _el(parent, "body", name=f"robot_{side}_arm_{i}", pos=pos)
            axis = {"shoulder_roll": (1, 0, 0), "shoulder_yaw": (0, 0, 1)}.get(suffix, (0, 1, 0))
            _joint(body, f"{side}_{suffix}", jr[f"{side}_{suffix}"], axis)
            extra = {"fromto": [0, 0, 0, 0, 0, -0.22]} if i >= 3 else {}
            _el(body, "geom", name=f"robot_{side}_arm_geom_{i}",
                type="capsule" if i >= 3 else "sphere", size="0.04",
                mass="0.8", **extra)
            parent = body
        hand = _el(parent, "body", name=f"{side}_hand_body", pos=[0, 0, -0.25])
        _el(hand, "geom", name=f"robot_{side}_hand_geom", type="sphere",
            size="0.045", mass="0.3")
        _el(hand, "site", name=f"{side}_hand", pos=[0, 0, 0], size="0.01")
        if with_hands:
            finger_names = [f"{side}_finger_{k:02d}" for k in range(22)]
            k = 0
            for finger in range(5):
                fparent = hand
                for seg in range(4):
                    if k >= len(finger_names):
                        break
                    name = finger_names[k]
                    fb = _el(fparent, "body", name=f"robot_{name}_body",
                             pos=[0.02 * (finger - 2), 0.02, -0.03 * (seg + 1)])
                    _joint(fb, name, jr[name], (0, 1, 0))
                    _el(fb, "geom", name=f"robot_{name}_geom", type="capsule",
                        fromto=[0, 0, 0, 0, 0, -0.02], size="0.008", mass="0.02")
                    fparent = fb
                    k += 1
            # two extra thumb segments finish the 22-joint hand
            for extra_i in range(k, 22):
                name = finger_names[extra_i]
                fb = _el(hand, "body", name=f"robot_{name}_body",
                         pos=[0.03, -0.02, -0.02 * (extra_i - k + 1)])
                _joint(fb, name, jr[name], (1, 0, 0))
                _el(fb, "geom", name=f"robot_{name}_geom", type="capsule",
                    fromto=[0, 0, 0, 0, 0, -0.02], size="0.008", mass="0.02")
    return robot


def add_actuators(root, robot):
    actuators = _el(root, "actuator")
    for name in robot.actuated_names:
        j = robot.joint_by_name(name)
        _el(actuators, "position", name=f"act_{name}", joint=name, kp="60",
            ctrlrange=[j.lower, j.upper], forcerange=[-150, 150])


def build_scene(task_id: str, with_hands: bool) -> ET.Element:
    task = load_task(task_id)
    root = ET.Element("mujoco", {"model": f"{task_id}_scene"})
    _el(root, "option", timestep="0.002", integrator="implicitfast")
    _el(root, "compiler", angle="radian", autolimits="true")
    default = _el(root, "default")
    _el(default, "geom", condim="3", friction=[1.0, 0.005, 0.0001])

    world = _el(root, "worldbody")
    _el(world, "geom", name="floor", type="plane", size=[20, 20, 0.1],
        rgba="0.8 0.9 0.8 1")
    _el(world, "light", pos=[0, 0, 3], dir=[0, 0, -1])

    robot = build_robot(world, with_hands)

    for name, pose in task.scene.bodies.items():
        body = _el(world, "body", name=name, pos=pose[:3],
                   quat=pose[3:7] if len(pose) == 7 else [1, 0, 0, 0])
        _el(body, "geom", name=f"{name}_geom", type="box", size=[0.2, 0.2, 0.2],
            mass="5")
    for name, spec in task.scene.objects.items():
        body = _el(world, "body", name=name, pos=spec["pos"])
        _el(body, "freejoint", name=f"{name}_free")
        _el(body, "geom", name=spec["geom"], type="sphere",
            size=str(spec.get("radius", 0.05)), mass="1")
    for name, spec in task.scene.sites.items():
        if spec.get("attach"):
            continue
        _el(world, "site", name=name, pos=spec["pos"], size="0.02",
            rgba="1 0 0 0.5")
    for jspec in task.scene.joints:
        holder = _el(world, "body", name=f"{jspec['name']}_holder",
                     pos=[2.0, 0, 0.5])
        _joint(holder, jspec["name"], jspec["range"], (0, 0, 1))
        _el(holder, "geom", name=f"{jspec['name']}_geom", type="box",
            size=[0.1, 0.1, 0.02], mass="0.5")

    add_actuators(root, robot)
    return root


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for task_id in SCENE_TASKS:
        for with_hands, suffix in ((True, ""), (False, "_nohands")):
            tree = ET.ElementTree(build_scene(task_id, with_hands))
            ET.indent(tree)
            path = OUT / f"{task_id}{suffix}.xml"
            tree.write(path, encoding="unicode")
            print(f"wrote {path}")


if __name__ == "__main__":
    main()

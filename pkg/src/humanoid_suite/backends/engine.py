"""Adapter to the MuJoCo rigid-body engine.

Loads MJCF scene files referenced by the task config (external assets,
resolved against an assets directory), maps the engine state into the
shared WorldState snapshot, and applies collision profiles by masking
geom groups. All named lookups resolve to integer handles once at load.
"""

import os

import numpy as np

from ..config import TaskSpec
from ..state import Contact, WorldState
from .base import BackendCapabilities, PhysicsBackend


class EngineUnavailable(RuntimeError):
    pass


def engine_available() -> bool:
    try:
        import mujoco  # noqa: F401
        return True
    except ImportError:
        return False


class EngineBackend(PhysicsBackend):
    def __init__(self, task: TaskSpec, collision_profile: str = "full",
                 assets_dir=None):
        try:
            import mujoco
        except ImportError as err:
            raise EngineUnavailable(
                "the mujoco package is not installed; install the 'engine' extra "
                "or use the scripted backend") from err
        self._mj = mujoco
        self.task = task
        self.robot = task.robot
        self._profile = collision_profile

        assets_dir = assets_dir or os.environ.get("HUMANOID_SUITE_ASSETS", "assets")
        scene_rel = task.scene.mjcf
        if collision_profile == "no_hands":
            root, ext = os.path.splitext(scene_rel)
            scene_rel = f"{root}_nohands{ext}"
        path = os.path.join(assets_dir, scene_rel)
        if not os.path.exists(path):
            raise FileNotFoundError(
                f"scene asset {path!r} not found; set --assets-dir or "
                "HUMANOID_SUITE_ASSETS")
        self.model = mujoco.MjModel.from_xml_path(path)
        self.data = mujoco.MjData(self.model)
        common = task.common["control"]
        self._dt = float(common["substep_dt"])
        self.model.opt.timestep = self._dt
        self._substeps = int(common["substeps"])
        self._apply_profile(collision_profile)
        self._resolve_handles()
        self.reset_home()

    # ------------------------------------------------------------------

    def _apply_profile(self, profile: str) -> None:
        """Mask collision geoms by naming convention (skin_*, *hand*, *foot*)."""
        if profile in ("full", "no_hands"):
            return
        model = self.model
        for gid in range(model.ngeom):
            name = self._geom_name(gid) or ""
            if not name.startswith("robot_"):
                continue
            keep = ("foot" in name) if profile == "feet_only" else \
                   ("foot" in name or not name.startswith("robot_skin_")
                    and "hand" not in name and "finger" not in name)
            if not keep:
                model.geom_contype[gid] = 0
                model.geom_conaffinity[gid] = 0

    def _geom_name(self, gid: int):
        return self._mj.mj_id2name(self.model, self._mj.mjtObj.mjOBJ_GEOM, gid)

    def _resolve_handles(self) -> None:
        mj = self._mj
        model = self.model
        self._body_ids = {}
        for name in list(self.robot.body_offsets) + list(self.task.scene.bodies) \
                + list(self.task.scene.objects):
            bid = mj.mj_name2id(model, mj.mjtObj.mjOBJ_BODY, name)
            if bid >= 0:
                self._body_ids[name] = bid
        self._site_ids = {}
        for name in list(self.robot.site_offsets) + list(self.task.scene.sites):
            sid = mj.mj_name2id(model, mj.mjtObj.mjOBJ_SITE, name)
            if sid >= 0:
                self._site_ids[name] = sid
        self._hinge_qpos = {}
        self._hinge_qvel = {}
        for name in self.robot.hinge_joint_names() + [j["name"] for j in self.task.scene.joints]:
            jid = mj.mj_name2id(model, mj.mjtObj.mjOBJ_JOINT, name)
            if jid >= 0:
                self._hinge_qpos[name] = model.jnt_qposadr[jid]
                self._hinge_qvel[name] = model.jnt_dofadr[jid]
        self._object_joint = {}
        for name in self.task.scene.objects:
            jid = mj.mj_name2id(model, mj.mjtObj.mjOBJ_JOINT, f"{name}_free")
            if jid >= 0:
                self._object_joint[name] = (model.jnt_qposadr[jid], model.jnt_dofadr[jid])
        self._pelvis = self._body_ids["pelvis"]
        self._geom_names = {gid: self._geom_name(gid) for gid in range(model.ngeom)}

    # ------------------------------------------------------------------

    def capabilities(self) -> BackendCapabilities:
        return BackendCapabilities(self._dt, self._substeps, self._profile,
                                   named_bodies=tuple(self._body_ids),
                                   named_sites=tuple(self._site_ids),
                                   engine="mujoco")

    def reset_home(self) -> None:
        self._mj.mj_resetData(self.model, self.data)
        if self.task.scene.robot_root_pos is not None:
            self.data.qpos[0:3] = self.task.scene.robot_root_pos
        for name, spec in self.task.scene.objects.items():
            if name in self._object_joint:
                adr, _ = self._object_joint[name]
                self.data.qpos[adr:adr + 3] = spec["pos"]
                self.data.qpos[adr + 3:adr + 7] = spec.get("quat", [1, 0, 0, 0])
        self.step_index = 0
        self._pending_forces = {}
        self._mj.mj_forward(self.model, self.data)

    def commit_reset(self) -> None:
        self.step_index = 0
        self._mj.mj_forward(self.model, self.data)

    def offset_hinge_joints(self, offsets: dict) -> None:
        for name, delta in offsets.items():
            if name in self._hinge_qpos:
                self.data.qpos[self._hinge_qpos[name]] += delta

    def set_root_pose(self, pos, quat) -> None:
        self.data.qpos[0:3] = pos
        self.data.qpos[3:7] = quat

    def set_site_pos(self, name: str, pos) -> None:
        if name not in self._site_ids:
            raise KeyError(f"scene has no site {name!r}")
        self.model.site_pos[self._site_ids[name]] = pos
        self._mj.mj_forward(self.model, self.data)

    def set_body_pose(self, name: str, pos, quat) -> None:
        bid = self._body_ids[name]
        if self.model.body_mocapid[bid] >= 0:
            mid = self.model.body_mocapid[bid]
            self.data.mocap_pos[mid] = pos
            self.data.mocap_quat[mid] = quat
        else:
            self.model.body_pos[bid] = pos
            self.model.body_quat[bid] = quat
        self._mj.mj_forward(self.model, self.data)

    def set_object(self, name: str, pos=None, quat=None, vel=None) -> None:
        adr, dof = self._object_joint[name]
        if pos is not None:
            self.data.qpos[adr:adr + 3] = pos
        if quat is not None:
            self.data.qpos[adr + 3:adr + 7] = quat
        if vel is not None:
            self.data.qvel[dof:dof + 3] = vel
        self._mj.mj_forward(self.model, self.data)

    def apply_perturbation(self, body: str, force) -> None:
        if body not in self._body_ids:
            raise KeyError(f"unknown body {body!r}")
        self._pending_forces[body] = np.asarray(force, dtype=np.float64)

    # ------------------------------------------------------------------

    def step(self, targets, substeps: int = None) -> WorldState:
        substeps = self._substeps if substeps is None else int(substeps)
        if substeps == 0:
            return self.snapshot()
        targets = np.asarray(targets, dtype=np.float64)
        if targets.shape[0] != self.model.nu:
            raise ValueError(f"expected {self.model.nu} targets, got {targets.shape[0]}")
        self.data.xfrc_applied[:] = 0.0
        for body, force in self._pending_forces.items():
            self.data.xfrc_applied[self._body_ids[body], 0:3] = force
        self._pending_forces = {}
        self.data.ctrl[:] = targets
        self._mj.mj_step(self.model, self.data, nstep=substeps)
        self.data.xfrc_applied[:] = 0.0
        self.step_index += 1
        state = self.snapshot()
        if not (np.all(np.isfinite(state.joint_pos)) and np.all(np.isfinite(state.joint_vel))):
            raise RuntimeError("simulation diverged")
        return state

    def snapshot(self) -> WorldState:
        data = self.data
        robot = self.robot
        qpos = np.empty(robot.nq + len(self.task.scene.joints))
        qvel = np.empty(robot.nv + len(self.task.scene.joints))
        qpos[0:7] = data.qpos[0:7]
        qvel[0:6] = data.qvel[0:6]
        idx_p, idx_v = 7, 6
        for name in robot.hinge_joint_names():
            qpos[idx_p] = data.qpos[self._hinge_qpos[name]]
            qvel[idx_v] = data.qvel[self._hinge_qvel[name]]
            idx_p += 1
            idx_v += 1
        # wrist quaternion blocks exist only in the synthetic robot model;
        # the engine robot is all hinges, so pad deterministically
        while idx_p < robot.nq:
            qpos[idx_p] = 1.0 if (idx_p - 7) % 26 == 0 else 0.0
            idx_p += 1
        while idx_v < robot.nv:
            qvel[idx_v] = 0.0
            idx_v += 1
        for i, j in enumerate(self.task.scene.joints):
            qpos[robot.nq + i] = data.qpos[self._hinge_qpos[j["name"]]]
            qvel[robot.nv + i] = data.qvel[self._hinge_qvel[j["name"]]]

        body_pose = {}
        body_linvel = {}
        for name, bid in self._body_ids.items():
            body_pose[name] = np.concatenate([data.xpos[bid], data.xquat[bid]])
            body_linvel[name] = self._body_vel(bid)
        site_pos = {name: data.site_xpos[sid].copy()
                    for name, sid in self._site_ids.items()}

        contacts = []
        for i in range(data.ncon):
            con = data.contact[i]
            contacts.append(Contact(self._geom_names.get(con.geom1, ""),
                                    self._geom_names.get(con.geom2, ""),
                                    0.0))

        quat = data.xquat[self._pelvis]
        z_proj = float(1.0 - 2.0 * (quat[1] ** 2 + quat[2] ** 2))
        R = np.zeros(9)
        self._mj.mju_quat2Mat(R, quat)
        R = R.reshape(3, 3)
        v_world = data.qvel[0:3]
        v_body = R.T @ v_world

        return WorldState(
            joint_pos=qpos, joint_vel=qvel, body_pose=body_pose,
            site_pos=site_pos, body_linvel=body_linvel,
            pelvis_frame_vel=(float(v_body[0]), float(v_body[1])),
            z_proj=float(np.clip(z_proj, -1.0, 1.0)),
            contacts=tuple(contacts), step_index=self.step_index,
        )

    def _body_vel(self, bid: int) -> np.ndarray:
        vel = np.zeros(6)
        self._mj.mj_objectVelocity(self.model, self.data,
                                   self._mj.mjtObj.mjOBJ_BODY, bid, vel, 0)
        return vel[3:6].copy()  # linear part, world frame

    def set_state(self, state: WorldState) -> None:
        robot = self.robot
        self.data.qpos[0:7] = state.joint_pos[0:7]
        self.data.qvel[0:6] = state.joint_vel[0:6]
        idx_p, idx_v = 7, 6
        for name in robot.hinge_joint_names():
            self.data.qpos[self._hinge_qpos[name]] = state.joint_pos[idx_p]
            self.data.qvel[self._hinge_qvel[name]] = state.joint_vel[idx_v]
            idx_p += 1
            idx_v += 1
        for i, j in enumerate(self.task.scene.joints):
            self.data.qpos[self._hinge_qpos[j["name"]]] = state.joint_pos[robot.nq + i]
            self.data.qvel[self._hinge_qvel[j["name"]]] = state.joint_vel[robot.nv + i]
        for name, (adr, dof) in self._object_joint.items():
            if name in state.body_pose:
                self.data.qpos[adr:adr + 7] = state.body_pose[name]
            if name in state.body_linvel:
                self.data.qvel[dof:dof + 3] = state.body_linvel[name]
        self.step_index = state.step_index
        self._mj.mj_forward(self.model, self.data)

"""Deterministic engine-free backend for tests, benchmarks, and rollouts.

The robot is a kinematic puppet: actuated joints track their position
targets with a rate limit, the floating root is a point mass moved by a
velocity program plus injected forces, robot bodies/sites ride rigidly on
the root (hand sites additionally follow a linear arm jacobian), and free
objects integrate ballistically with an analytic floor contact. Everything
is plain float arithmetic with a fixed update order, so trajectories are
bit-reproducible.
"""


import numpy as np

from ..config import TaskSpec
from ..state import Contact, WorldState
from .base import BackendCapabilities, PhysicsBackend

ROOT_MASS = 10.0     # kg, point-mass root used for force perturbations
OBJECT_MASS = 1.0
SERVO_RATE = 6.0     # rad/s joint target tracking speed


def _quat_mat(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


class ScriptedBackend(PhysicsBackend):
    def __init__(self, task: TaskSpec, collision_profile: str = "full"):
        self.task = task
        self.robot = task.robot
        self.scene = task.scene
        common = task.common["control"]
        self._dt = float(common["substep_dt"])
        self._substeps = int(common["substeps"])
        self._profile = collision_profile
        self._act_qpos = self.robot.actuated_qpos_indices()
        self._act_qvel = np.array(
            [self.robot.hinge_qvel_index(n) for n in self.robot.actuated_names], dtype=np.int64)
        self._hinge_names = self.robot.hinge_joint_names()
        self.clamp_warnings = 0
        self.reset_home()

    # ------------------------------------------------------------------
    # state setup

    def reset_home(self) -> None:
        r = self.robot
        self.qpos = r.home_qpos()
        if self.scene.robot_root_pos is not None:
            self.qpos[0:3] = self.scene.robot_root_pos
        self.qvel = np.zeros(r.nv)
        self.scene_qpos = np.array([j["home"] for j in self.scene.joints], dtype=np.float64)
        self.scene_qvel = np.zeros(len(self.scene.joints))
        self.root_vel = np.zeros(3)
        self.obj_pos = {}
        self.obj_quat = {}
        self.obj_vel = {}
        for name, spec in self.scene.objects.items():
            self.obj_pos[name] = np.array(spec["pos"], dtype=np.float64)
            self.obj_quat[name] = np.array(spec.get("quat", [1.0, 0.0, 0.0, 0.0]), dtype=np.float64)
            self.obj_vel[name] = np.zeros(3)
        self.scene_body_pose = {name: np.array(pose, dtype=np.float64)
                                for name, pose in self.scene.bodies.items()}
        self.static_sites = {}
        for name, spec in self.scene.sites.items():
            if not spec.get("attach"):
                self.static_sites[name] = np.array(spec["pos"], dtype=np.float64)
        self.step_index = 0
        self._pending_forces = {}
        self._scheduled_contacts = {}
        self._current_contacts = []
        self._velocity_program = None

    def commit_reset(self) -> None:
        self.step_index = 0
        self._current_contacts = []

    def capabilities(self) -> BackendCapabilities:
        bodies = tuple(self.robot.body_offsets) + tuple(self.scene.bodies) + tuple(self.scene.objects)
        sites = tuple(self.robot.site_offsets) + tuple(self.scene.sites)
        return BackendCapabilities(self._dt, self._substeps, self._profile,
                                   named_bodies=bodies, named_sites=sites,
                                   engine="scripted")

    # ------------------------------------------------------------------
    # scripting hooks (tests and benches)

    def set_root_velocity(self, vel) -> None:
        """Constant root velocity held until changed."""
        self.root_vel = np.asarray(vel, dtype=np.float64).copy()

    def set_velocity_program(self, fn) -> None:
        """fn(step_index) -> 3-vector root velocity, evaluated per control step."""
        self._velocity_program = fn

    def schedule_contact(self, step: int, contact: Contact) -> None:
        self._scheduled_contacts.setdefault(step, []).append(contact)

    def inject_contact(self, contact: Contact) -> None:
        self._current_contacts.append(contact)

    def set_scene_joint(self, name: str, value: float, vel: float = 0.0) -> None:
        idx = self.scene.scene_joint_index(name)
        self.scene_qpos[idx] = value
        self.scene_qvel[idx] = vel

    # ------------------------------------------------------------------
    # mutators used at reset

    def offset_hinge_joints(self, offsets: dict) -> None:
        for name, delta in offsets.items():
            self.qpos[self.robot.hinge_qpos_index(name)] += delta

    def set_root_pose(self, pos, quat) -> None:
        self.qpos[0:3] = np.asarray(pos, dtype=np.float64)
        self.qpos[3:7] = np.asarray(quat, dtype=np.float64)

    def set_site_pos(self, name: str, pos) -> None:
        if name not in self.static_sites:
            raise KeyError(f"site {name!r} is not a settable static site")
        self.static_sites[name] = np.asarray(pos, dtype=np.float64).copy()

    def set_body_pose(self, name: str, pos, quat) -> None:
        if name not in self.scene_body_pose:
            raise KeyError(f"scene has no body {name!r}")
        self.scene_body_pose[name] = np.concatenate([np.asarray(pos, dtype=np.float64),
                                                     np.asarray(quat, dtype=np.float64)])

    def set_object(self, name: str, pos=None, quat=None, vel=None) -> None:
        if name not in self.obj_pos:
            raise KeyError(f"scene has no object {name!r}")
        if pos is not None:
            self.obj_pos[name] = np.asarray(pos, dtype=np.float64).copy()
        if quat is not None:
            self.obj_quat[name] = np.asarray(quat, dtype=np.float64).copy()
        if vel is not None:
            self.obj_vel[name] = np.asarray(vel, dtype=np.float64).copy()

    def apply_perturbation(self, body: str, force) -> None:
        force = np.asarray(force, dtype=np.float64)
        if body in self.robot.body_offsets:
            key = "__root__"
        elif body in self.obj_pos:
            key = body
        else:
            raise KeyError(f"unknown body {body!r}")
        self._pending_forces[key] = self._pending_forces.get(key, np.zeros(3)) + force

    # ------------------------------------------------------------------
    # stepping

    def step(self, targets, substeps: int = None) -> WorldState:
        substeps = self._substeps if substeps is None else int(substeps)
        if substeps == 0:
            return self.snapshot()
        targets = np.asarray(targets, dtype=np.float64)
        if targets.shape != (self.robot.action_dim,):
            raise ValueError(f"expected {self.robot.action_dim} targets, got {targets.shape}")
        if not np.all(np.isfinite(targets)):
            raise ValueError("non-finite joint targets")

        control_dt = substeps * self._dt
        if self._velocity_program is not None:
            self.root_vel = np.asarray(self._velocity_program(self.step_index), dtype=np.float64)
        for key, force in self._pending_forces.items():
            if key == "__root__":
                self.root_vel = self.root_vel + force / ROOT_MASS * control_dt
            else:
                self.obj_vel[key] = self.obj_vel[key] + force / OBJECT_MASS * control_dt
        self._pending_forces = {}

        floor_hits = []
        for _ in range(substeps):
            q = self.qpos[self._act_qpos]
            delta = np.clip(targets - q, -SERVO_RATE * self._dt, SERVO_RATE * self._dt)
            self.qpos[self._act_qpos] = q + delta
            self.qvel[self._act_qvel] = delta / self._dt

            self.qpos[0:3] += self.root_vel * self._dt
            self.qvel[0:3] = self.root_vel

            for name, spec in self.scene.objects.items():
                vel = self.obj_vel[name]
                if spec.get("gravity"):
                    vel = vel + np.array([0.0, 0.0, -9.81 * self._dt])
                pos = self.obj_pos[name] + vel * self._dt
                radius = spec.get("radius", 0.0)
                if pos[2] < radius and vel[2] < 0.0:
                    pos[2] = radius
                    vel = np.zeros(3)
                    floor_hits.append(Contact(spec["geom"], "floor", 1.0))
                self.obj_pos[name] = pos
                self.obj_vel[name] = vel

        self.step_index += 1
        contacts = list(self._scheduled_contacts.get(self.step_index, ()))
        seen = set()
        for c in floor_hits:
            if c.pair() not in seen:
                seen.add(c.pair())
                contacts.append(c)
        self._current_contacts = contacts

        state = self.snapshot()
        flat = np.concatenate([state.joint_pos, state.joint_vel])
        if not np.all(np.isfinite(flat)):
            raise RuntimeError("simulation diverged")
        return state

    # ------------------------------------------------------------------
    # snapshots

    def snapshot(self) -> WorldState:
        r = self.robot
        root_pos = self.qpos[0:3]
        root_quat = self.qpos[3:7]
        R = _quat_mat(root_quat)

        body_pose = {}
        body_linvel = {}
        for name, offset in r.body_offsets.items():
            pos = root_pos + R @ offset
            body_pose[name] = np.concatenate([pos, root_quat])
            body_linvel[name] = self.root_vel.copy()

        site_pos = {}
        for name, offset in r.site_offsets.items():
            world_offset = offset.copy()
            for side, (joints, jac) in r.hand_jacobian.items():
                if name == f"{side}_hand":
                    arm = np.array([self.qpos[r.hinge_qpos_index(j)] for j in joints])
                    world_offset = world_offset + jac @ arm
            site_pos[name] = root_pos + R @ world_offset

        for name, pose in self.scene_body_pose.items():
            body_pose[name] = pose.copy()
        for name in self.obj_pos:
            body_pose[name] = np.concatenate([self.obj_pos[name], self.obj_quat[name]])
            body_linvel[name] = self.obj_vel[name].copy()

        for name, pos in self.static_sites.items():
            site_pos[name] = pos.copy()
        for name, spec in self.scene.sites.items():
            parent = spec.get("attach")
            if parent:
                Rp = _quat_mat(self.obj_quat[parent]) if parent in self.obj_quat \
                    else _quat_mat(self.scene_body_pose[parent][3:7])
                base = self.obj_pos.get(parent, self.scene_body_pose.get(parent, [0, 0, 0, 1, 0, 0, 0])[:3])
                site_pos[name] = np.asarray(base) + Rp @ np.asarray(spec["offset"], dtype=np.float64)

        qw, qx, qy, qz = root_quat
        z_proj = 1.0 - 2.0 * (qx * qx + qy * qy)
        v_body = R.T @ self.root_vel

        return WorldState(
            joint_pos=np.concatenate([self.qpos, self.scene_qpos]),
            joint_vel=np.concatenate([self.qvel, self.scene_qvel]),
            body_pose=body_pose,
            site_pos=site_pos,
            body_linvel=body_linvel,
            pelvis_frame_vel=(float(v_body[0]), float(v_body[1])),
            z_proj=float(np.clip(z_proj, -1.0, 1.0)),
            contacts=tuple(self._current_contacts),
            step_index=self.step_index,
        )

    def set_state(self, state: WorldState) -> None:
        r = self.robot
        n_scene = len(self.scene.joints)
        if state.joint_pos.shape != (r.nq + n_scene,) or state.joint_vel.shape != (r.nv + n_scene,):
            raise ValueError("state dimensions do not match this scene")
        self.qpos = state.joint_pos[:r.nq].copy()
        self.qvel = state.joint_vel[:r.nv].copy()
        self.scene_qpos = state.joint_pos[r.nq:].copy()
        self.scene_qvel = state.joint_vel[r.nv:].copy()
        self.root_vel = state.body_linvel.get("pelvis", np.zeros(3)).copy()
        for name in self.obj_pos:
            if name in state.body_pose:
                self.obj_pos[name] = state.body_pose[name][:3].copy()
                self.obj_quat[name] = state.body_pose[name][3:7].copy()
            if name in state.body_linvel:
                self.obj_vel[name] = state.body_linvel[name].copy()
        for name in self.scene_body_pose:
            if name in state.body_pose:
                self.scene_body_pose[name] = state.body_pose[name].copy()
        for name in self.static_sites:
            if name in state.site_pos:
                self.static_sites[name] = state.site_pos[name].copy()
        self.step_index = state.step_index
        self._current_contacts = list(state.contacts)

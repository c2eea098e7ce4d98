"""World snapshot passed between backends, reward programs, and observers."""

from dataclasses import dataclass, field

import numpy as np

QUAT_NORM_TOL = 1e-9


@dataclass
class Contact:
    """One contact pair reported by the backend for the current control step."""

    geom_a: str
    geom_b: str
    force: float = 0.0

    def involves(self, names) -> bool:
        return self.geom_a in names or self.geom_b in names

    def pair(self) -> frozenset:
        return frozenset((self.geom_a, self.geom_b))


@dataclass
class WorldState:
    """Snapshot of the physics at a control-step boundary.

    joint_pos/joint_vel hold the robot joints first, then any scene joints
    (doors, drawers, switches); the task config's joint table maps names to
    indices. body_pose values are 7-vectors [x y z qw qx qy qz].
    """

    joint_pos: np.ndarray
    joint_vel: np.ndarray
    body_pose: dict = field(default_factory=dict)
    site_pos: dict = field(default_factory=dict)
    body_linvel: dict = field(default_factory=dict)
    pelvis_frame_vel: tuple = (0.0, 0.0)
    z_proj: float = 1.0
    contacts: tuple = ()
    step_index: int = 0

    def validate(self) -> "WorldState":
        if self.step_index < 0:
            raise ValueError("step_index must be >= 0")
        if not -1.0 - 1e-12 <= self.z_proj <= 1.0 + 1e-12:
            raise ValueError("z_proj outside [-1, 1]")
        for name, pose in self.body_pose.items():
            q = pose[3:7]
            if abs(float(np.dot(q, q)) - 1.0) > 2 * QUAT_NORM_TOL:
                raise ValueError(f"body {name!r} quaternion not unit-norm")
        return self

    def body_pos(self, name: str) -> np.ndarray:
        try:
            return self.body_pose[name][:3]
        except KeyError:
            raise KeyError(f"state has no body named {name!r}") from None

    def body_quat(self, name: str) -> np.ndarray:
        try:
            return self.body_pose[name][3:7]
        except KeyError:
            raise KeyError(f"state has no body named {name!r}") from None

    def site(self, name: str) -> np.ndarray:
        try:
            return self.site_pos[name]
        except KeyError:
            raise KeyError(f"state has no site named {name!r}") from None

    def linvel(self, name: str) -> np.ndarray:
        try:
            return self.body_linvel[name]
        except KeyError:
            raise KeyError(f"state has no velocity for body {name!r}") from None

    def copy(self) -> "WorldState":
        return WorldState(
            joint_pos=self.joint_pos.copy(),
            joint_vel=self.joint_vel.copy(),
            body_pose={k: v.copy() for k, v in self.body_pose.items()},
            site_pos={k: v.copy() for k, v in self.site_pos.items()},
            body_linvel={k: v.copy() for k, v in self.body_linvel.items()},
            pelvis_frame_vel=tuple(self.pelvis_frame_vel),
            z_proj=self.z_proj,
            contacts=tuple(self.contacts),
            step_index=self.step_index,
        )


def states_equal(a: WorldState, b: WorldState) -> bool:
    """Bit-exact equality on every stored field."""
    if not (np.array_equal(a.joint_pos, b.joint_pos) and np.array_equal(a.joint_vel, b.joint_vel)):
        return False
    for da, db in ((a.body_pose, b.body_pose), (a.site_pos, b.site_pos), (a.body_linvel, b.body_linvel)):
        if da.keys() != db.keys():
            return False
        if any(not np.array_equal(da[k], db[k]) for k in da):
            return False
    return (tuple(a.pelvis_frame_vel) == tuple(b.pelvis_frame_vel)
            and a.z_proj == b.z_proj
            and tuple(a.contacts) == tuple(b.contacts)
            and a.step_index == b.step_index)

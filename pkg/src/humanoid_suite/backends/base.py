"""Backend adapter contract shared by the scripted and engine backends."""

from dataclasses import dataclass


COLLISION_PROFILES = ("full", "simplified_body", "feet_only", "no_hands")


@dataclass
class BackendCapabilities:
    substep_dt: float
    substeps_per_control: int
    collision_profile: str
    named_bodies: tuple = ()
    named_sites: tuple = ()
    engine: str = "scripted"

    def __post_init__(self):
        if self.substep_dt <= 0:
            raise ValueError("substep_dt must be positive")
        if self.collision_profile not in COLLISION_PROFILES:
            raise ValueError(f"unknown collision profile {self.collision_profile!r}")

    @property
    def control_period(self) -> float:
        return self.substep_dt * self.substeps_per_control

    def report(self) -> str:
        lines = [f"engine: {self.engine}",
                 f"collision_profile: {self.collision_profile}",
                 f"substep_dt: {self.substep_dt}",
                 f"substeps_per_control: {self.substeps_per_control}",
                 f"control_period: {self.control_period}",
                 f"bodies: {', '.join(self.named_bodies)}",
                 f"sites: {', '.join(self.named_sites)}"]
        return "\n".join(lines)


class PhysicsBackend:
    """Interface every backend implements; one instance per episode worker."""

    def capabilities(self) -> BackendCapabilities:
        raise NotImplementedError

    def reset_home(self) -> None:
        raise NotImplementedError

    def commit_reset(self) -> None:
        """Finalize mutations made during reset (recompute derived state)."""
        raise NotImplementedError

    def step(self, targets, substeps: int):
        raise NotImplementedError

    def snapshot(self):
        raise NotImplementedError

    def set_state(self, state) -> None:
        raise NotImplementedError

    def apply_perturbation(self, body: str, force) -> None:
        raise NotImplementedError

    # reset-time mutators used by the episode machine
    def offset_hinge_joints(self, offsets: dict) -> None:
        raise NotImplementedError

    def set_root_pose(self, pos, quat) -> None:
        raise NotImplementedError

    def set_site_pos(self, name: str, pos) -> None:
        raise NotImplementedError

    def set_body_pose(self, name: str, pos, quat) -> None:
        raise NotImplementedError

    def set_object(self, name: str, pos=None, quat=None, vel=None) -> None:
        raise NotImplementedError

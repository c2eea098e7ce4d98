"""Shared posture and effort reward terms."""

import numpy as np

from . import kernels
from .tolerance import Bounds, ToleranceSpec, tolerance

EFFORT_FLOOR = 0.8  # limit of the effort term as |u| grows


def effort_term(u: np.ndarray, margin: float = 10.0, value_at_margin: float = 0.1) -> float:
    """Control-effort reward in [0.8, 1.0]; exactly 1.0 at zero action."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    if u.size == 0:
        raise ValueError("empty action vector")
    return 0.2 * (4.0 + float(kernels.effort_mean(u, margin, value_at_margin)))


def _spec(bounds, margin, common) -> ToleranceSpec:
    tolc = common["tolerance"]
    return ToleranceSpec(Bounds(bounds[0], bounds[1]), margin,
                         tolc["value_at_margin"], tolc["sigmoid"])


def height_term(z_head: float, common: dict, bounds=None, margin=None) -> float:
    c = common["height"]
    return tolerance(z_head, _spec(bounds or c["bounds"], c["margin"] if margin is None else margin, common))


def upright_term(z_proj: float, common: dict, bounds=None, margin=None) -> float:
    c = common["upright"]
    return tolerance(z_proj, _spec(bounds or c["bounds"], c["margin"] if margin is None else margin, common))


def still_terms(v_x: float, v_y: float, common: dict) -> tuple:
    m = common["still"]["margin"]
    sx = tolerance(v_x, _spec((0.0, 0.0), m, common))
    sy = tolerance(v_y, _spec((0.0, 0.0), m, common))
    return sx, sy


def posture_terms(state, action: np.ndarray, common: dict) -> dict:
    """height / upright / stand / stable / still for the current snapshot."""
    z_head = float(state.body_pos("head")[2])
    height = height_term(z_head, common)
    upright = upright_term(state.z_proj, common)
    stand = height * upright
    effort = effort_term(action, common["effort"]["margin"],
                         common["tolerance"]["value_at_margin"])
    stable = stand * effort
    sx, sy = still_terms(state.pelvis_frame_vel[0], state.pelvis_frame_vel[1], common)
    return {
        "height": height,
        "upright": upright,
        "stand": stand,
        "effort": effort,
        "stable": stable,
        "still": 0.5 * (sx + sy),
        "still_x": sx,
        "still_y": sy,
    }

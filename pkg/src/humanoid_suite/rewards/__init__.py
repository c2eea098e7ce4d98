from .tolerance import Bounds, ToleranceSpec, tol, tolerance, tolerance_many
from .terms import effort_term, posture_terms
from .tasks import RewardBreakdown, compute_reward

__all__ = ["Bounds", "ToleranceSpec", "tol", "tolerance", "tolerance_many",
           "effort_term", "posture_terms", "RewardBreakdown", "compute_reward"]

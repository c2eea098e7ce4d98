from .machine import EpisodeState, TerminationStatus, advance_task_stage, check_termination, reset
from .worker import TaskEnv, make_backend

__all__ = ["EpisodeState", "TerminationStatus", "advance_task_stage",
           "check_termination", "reset", "TaskEnv", "make_backend"]

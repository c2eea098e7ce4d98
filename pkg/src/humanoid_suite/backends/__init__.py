from .base import BackendCapabilities, PhysicsBackend, COLLISION_PROFILES
from .scripted import ScriptedBackend

__all__ = ["BackendCapabilities", "PhysicsBackend", "COLLISION_PROFILES", "ScriptedBackend"]

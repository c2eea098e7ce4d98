"""Physics-agnostic humanoid task suite."""

__version__ = "0.1.0"

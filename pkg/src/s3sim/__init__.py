"""Agent-based social network simulation with pluggable cognition backends."""

__version__ = "0.1.0"

"""Protection and recovery game on infrastructure networks."""

__version__ = "0.1.0"

"""Game environments, feature pipelines, agents, planners and evaluation metrics."""

__version__ = "0.1.0"

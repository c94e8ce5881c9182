"""Online planners that use save/restore snapshots as a generative model."""

from .bfs import BfsResult, bfs_plan, bfs_search
from .oracles import (
    EnumerationResult, enumerate_plan, monte_carlo_rollout_mean, optimal_actions,
    policy_evaluation, random_policy_moments, value_iteration,
)
from .tree import PlannerConfig, SearchNode
from .uct import SearchTree, UCTPlanner, best_action, expand, rollout, select_action, uct_plan, ucb_score, update_value

__all__ = [
    "BfsResult", "bfs_plan", "bfs_search",
    "EnumerationResult", "enumerate_plan", "monte_carlo_rollout_mean", "optimal_actions",
    "policy_evaluation", "random_policy_moments", "value_iteration",
    "PlannerConfig", "SearchNode",
    "SearchTree", "UCTPlanner", "best_action", "expand", "rollout", "select_action", "uct_plan",
    "ucb_score", "update_value",
]

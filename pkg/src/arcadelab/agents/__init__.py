"""Learning agents and baseline policies."""

from .baselines import PERTURB_P, BaselinePolicy, BaselineResult, baseline_agents, baseline_policies, run_policy
from .sarsa import (
    FEATURE_DEFAULTS, DivergenceError, LinearQ, RlConfig, TrialResult, greedy_actions,
    q_value, run_episode, run_rl_trial, sarsa_step, select_action,
)

__all__ = [
    "PERTURB_P", "BaselinePolicy", "BaselineResult", "baseline_agents", "baseline_policies", "run_policy",
    "FEATURE_DEFAULTS", "DivergenceError", "LinearQ", "RlConfig", "TrialResult", "greedy_actions",
    "q_value", "run_episode", "run_rl_trial", "sarsa_step", "select_action",
]

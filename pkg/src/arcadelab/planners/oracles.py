"""Exact reference answers for small problems: value iteration, brute-force
enumeration of action sequences, and exact random-policy returns."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..env.core import N_ACTIONS, EmulatorState, Environment
from ..env.games import TabularMDP

TIE_TOL = 1e-9


def _group_q(mdp: TabularMDP, V: np.ndarray, gamma: float) -> np.ndarray:
    cont = np.where(mdp.terminal[mdp.next_state], 0.0, V[mdp.next_state])
    return mdp.rewards + gamma * cont


def value_iteration(mdp: TabularMDP, gamma: float, tol: float = 1e-12, max_iter: int = 1_000_000):
    """Optimal state values and group action values of a deterministic tabular MDP.

    Terminal states are absorbing with value 0. Returns ``(V, Q)`` where
    ``Q`` has one column per action group.
    """
    V = np.zeros(mdp.n_states)
    for _ in range(max_iter):
        Q = _group_q(mdp, V, gamma)
        V_new = np.where(mdp.terminal, 0.0, Q.max(axis=1))
        if np.max(np.abs(V_new - V)) <= tol:
            V = V_new
            break
        V = V_new
    return V, _group_q(mdp, V, gamma)


def optimal_actions(mdp: TabularMDP, Q: np.ndarray, state: int, tol: float = TIE_TOL) -> set[int]:
    """All of the 18 actions whose group is optimal in ``state``."""
    best = Q[state].max()
    good = {g for g in range(mdp.n_groups) if Q[state, g] >= best - tol}
    return {a for a in range(N_ACTIONS) if int(mdp.groups[a]) in good}


def policy_evaluation(mdp: TabularMDP, policy: np.ndarray, gamma: float) -> np.ndarray:
    """Exact value of a deterministic per-state action choice (``policy[s]`` in 0..17)."""
    n = mdp.n_states
    g = mdp.groups[np.asarray(policy)]
    nxt = mdp.next_state[np.arange(n), g]
    r = mdp.rewards[np.arange(n), g].astype(np.float64)
    P = np.zeros((n, n))
    live = ~mdp.terminal
    P[np.arange(n)[live], nxt[live]] = 1.0
    P[:, mdp.terminal] = 0.0  # entering a terminal state ends the episode
    r[mdp.terminal] = 0.0
    return np.linalg.solve(np.eye(n) - gamma * P, r)


@dataclass
class EnumerationResult:
    values: np.ndarray  # (18,) best discounted return starting with each root action
    best_value: float

    def optimal_set(self, tol: float = TIE_TOL) -> set[int]:
        return {a for a in range(N_ACTIONS) if self.values[a] >= self.best_value - tol}

    @property
    def action(self) -> int:
        return min(self.optimal_set())


def enumerate_plan(env: Environment, state: EmulatorState, depth: int, gamma: float) -> EnumerationResult:
    """Replay every one of the 18^depth action sequences from ``state``.

    Each sequence scores sum_t gamma^t r_t, stopping early at terminal; the
    value of a root action is the best score over sequences that start with it.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    values = np.full(N_ACTIONS, -np.inf)
    for seq in itertools.product(range(N_ACTIONS), repeat=depth):
        env.restore_state(state)
        total, g = 0.0, 1.0
        for a in seq:
            if env.terminal:
                break
            r, _ = env.emulate(a)
            total += g * r
            g *= gamma
        if total > values[seq[0]]:
            values[seq[0]] = total
    return EnumerationResult(values, float(values.max()))


def random_policy_moments(mdp: TabularMDP, steps: int, gamma: float = 1.0) -> tuple[float, float]:
    """Exact mean and variance of the return of uniform-random play for ``steps`` decisions from the start."""
    p = np.bincount(mdp.groups, minlength=mdp.n_groups) / N_ACTIONS
    m1 = np.zeros(mdp.n_states)
    m2 = np.zeros(mdp.n_states)
    term = mdp.terminal
    r = mdp.rewards.astype(np.float64)
    for _ in range(steps):
        n1 = np.where(term[mdp.next_state], 0.0, m1[mdp.next_state])
        n2 = np.where(term[mdp.next_state], 0.0, m2[mdp.next_state])
        # E[(r + gamma R')^2] = r^2 + 2 gamma r E[R'] + gamma^2 E[R'^2]
        m1_new = (p * (r + gamma * n1)).sum(axis=1)
        m2_new = (p * (r * r + 2 * gamma * r * n1 + gamma * gamma * n2)).sum(axis=1)
        m1 = np.where(term, 0.0, m1_new)
        m2 = np.where(term, 0.0, m2_new)
    mean = float(m1[mdp.start])
    return mean, float(m2[mdp.start] - mean * mean)


def monte_carlo_rollout_mean(env: Environment, state: EmulatorState, steps: int, gamma: float,
                             episodes: int, seed: int = 0) -> tuple[float, float]:
    """Sample mean and standard error of uniform-random rollouts from ``state``."""
    rng = np.random.default_rng(seed)
    out = np.empty(episodes)
    for i in range(episodes):
        env.restore_state(state)
        total, g = 0.0, 1.0
        for _ in range(steps):
            if env.terminal:
                break
            r, _ = env.emulate(int(rng.integers(N_ACTIONS)))
            total += g * r
            g *= gamma
        out[i] = total
    return float(out.mean()), float(out.std(ddof=1) / np.sqrt(episodes))

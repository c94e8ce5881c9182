"""UCT over environment snapshots, with sibling duplicate merging and tree reuse."""

from __future__ import annotations

import json
import math
from typing import TextIO

import numpy as np

from ..env.core import N_ACTIONS, EmulatorState, Environment
from .tree import PlannerConfig, SearchNode


def ucb_score(child: SearchNode, parent_visits: int, c: float, form: str = "standard") -> float:
    if form == "standard":
        return child.average_return + c * math.sqrt(math.log(parent_visits) / child.visits)
    # alternative form: log of the child's visits over the parent's, no constant
    return child.average_return + math.sqrt(math.log(child.visits) / parent_visits)


def select_action(node: SearchNode, c: float, form: str = "standard") -> int:
    """Highest UCB score over expanded actions; ties go to the lowest action id."""
    best_a, best_v = -1, -math.inf
    for a in sorted(node.children):
        v = ucb_score(node.children[a], node.visits, c, form)
        if v > best_v:
            best_a, best_v = a, v
    return best_a


def best_action(root: SearchNode) -> int:
    """Most-visited root action (lowest id on ties); 0 if nothing was expanded."""
    best_a, best_n = 0, -1
    for a in sorted(root.children):
        n = root.children[a].visits
        if n > best_n:
            best_a, best_n = a, n
    return best_a


def rollout(env: Environment, node: SearchNode, steps: int, gamma: float, rng: np.random.Generator) -> float:
    """Uniform-random play from ``node`` for up to ``steps`` decisions; returns sum gamma^t r_t."""
    if steps <= 0 or node.terminal:
        return 0.0
    env.restore_state(node.snapshot)
    return env.play(rng.integers(N_ACTIONS, size=steps), gamma)


def update_value(node: SearchNode, R: float, gamma: float) -> None:
    """Back up ``R`` from ``node`` to the root, adding each node's edge reward."""
    while node is not None:
        R += node.immediate_return
        v = node.visits
        node.average_return = node.average_return * v / (v + 1) + R / (v + 1)
        node.visits = v + 1
        R *= gamma
        node = node.parent


def expand(env: Environment, node: SearchNode) -> tuple[int, SearchNode] | None:
    """Expand the lowest untried action.

    An action whose child snapshot is byte-identical to an existing sibling
    becomes an alias of that sibling and the next untried action is tried;
    returns ``(action, child)``, or None when every remaining action turned
    out to be an alias.
    """
    while node.untried:
        a = node.untried.pop(0)
        env.restore_state(node.snapshot)
        r, term = env.emulate(a)
        snap = env.save_state()
        twin = next((c for c in node.children.values() if c.snapshot.payload == snap.payload), None)
        if twin is not None:
            node.children[a] = twin
            continue
        child = SearchNode(snap, r, depth=node.depth + 1, terminal=term, parent=node)
        if term:
            child.untried = []
        node.children[a] = child
        return a, child
    return None


class SearchTree:
    def __init__(self, root: SearchNode | None = None):
        self.root = root

    def reset(self, snapshot: EmulatorState, terminal: bool = False) -> None:
        self.root = SearchNode(snapshot, terminal=terminal, untried=[] if terminal else list(range(N_ACTIONS)))

    def prune(self, action: int) -> None:
        """Make the child reached by ``action`` the new root, keeping its statistics."""
        child = self.root.children.get(action)
        if child is None:
            self.root = None
            return
        child.parent = None
        child.immediate_return = 0.0
        shift = child.depth
        for n in child.iter_subtree():
            n.depth -= shift
        self.root = child


class UCTPlanner:
    """UCT with a private simulator cloned from the caller's environment."""

    def __init__(self, env: Environment, config: PlannerConfig = PlannerConfig(), seed: int = 0,
                 trace: TextIO | None = None):
        self.sim = env.clone()
        self.config = config
        self.rng = np.random.default_rng(seed)
        self.tree = SearchTree()
        self.trace = trace
        self.samples_run = 0

    @property
    def horizon(self) -> int:
        return self.config.depth_steps(self.sim.config.frames_per_action)

    def sample(self) -> None:
        root, m = self.tree.root, self.horizon
        node = root
        path: list[int] = []
        while not node.terminal and node.depth < m:
            if node.untried:
                expanded = expand(self.sim, node)
                if expanded is not None:
                    path.append(expanded[0])
                    node = expanded[1]
                    break
                if not node.children:
                    break
            a = select_action(node, self.config.exploration, self.config.ucb)
            path.append(a)
            node = node.children[a]
        node.stops += 1
        R = rollout(self.sim, node, m - node.depth, self.config.gamma, self.rng)
        if self.trace is not None:
            rewards, n = [], node
            while n is not root:
                rewards.append(n.immediate_return)
                n = n.parent
            self.trace.write(json.dumps({"actions": path, "rewards": rewards[::-1], "rollout": R}) + "\n")
        update_value(node, R, self.config.gamma)
        self.samples_run += 1

    def plan(self, state: EmulatorState | None = None) -> int:
        """Choose an action for ``state`` (default: the simulator's current state)."""
        if state is None:
            state = self.sim.save_state()
        root = self.tree.root
        if root is None or not self.config.reuse or root.snapshot.payload != state.payload:
            self.sim.restore_state(state)
            self.tree.reset(state, self.sim.terminal)
        while self.tree.root.visits < self.config.simulations:
            self.sample()
        a = best_action(self.tree.root)
        if self.config.reuse:
            self.tree.prune(a)
        else:
            self.tree.root = None
        return a


def uct_plan(env: Environment, config: PlannerConfig = PlannerConfig(), seed: int = 0,
             tree: SearchTree | None = None) -> int:
    """One-shot UCT decision for ``env``'s current state; ``env`` is left untouched."""
    planner = UCTPlanner(env, config, seed)
    if tree is not None:
        planner.tree = tree
    return planner.plan(env.save_state())

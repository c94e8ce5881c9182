"""Breadth-first full-tree search under a frame budget."""

from __future__ import annotations

from collections import deque

from ..env.core import N_ACTIONS, EmulatorState, Environment
from .tree import PlannerConfig, SearchNode


class BfsResult:
    def __init__(self, action: int, root: SearchNode, frames_used: int, values: dict[int, float]):
        self.action = action
        self.root = root
        self.frames_used = frames_used
        self.values = values  # root action -> reward + gamma * value(child)


def bfs_search(env: Environment, state: EmulatorState, config: PlannerConfig = PlannerConfig()) -> BfsResult:
    """Expand level by level until the next expansion would exceed the frame budget.

    Every expansion is charged ``frames_per_action`` frames. Terminal nodes
    (and nodes at ``bfs_max_depth``) are not expanded; there is no duplicate
    merging. Values back up as value(leaf) = 0 and
    value(n) = max over expanded children of reward + gamma * value(child).
    """
    fpa = env.config.frames_per_action
    budget, max_depth, gamma = config.bfs_frame_budget, config.bfs_max_depth, config.gamma
    env.restore_state(state)
    root = SearchNode(state, terminal=env.terminal, untried=[])
    queue = deque([root])
    order = []
    used = 0
    exhausted = False
    while queue and not exhausted:
        node = queue.popleft()
        order.append(node)
        if node.terminal or (max_depth is not None and node.depth >= max_depth):
            continue
        for a in range(N_ACTIONS):
            if used + fpa > budget:
                exhausted = True
                break
            env.restore_state(node.snapshot)
            r, term = env.emulate(a)
            used += fpa
            child = SearchNode(env.save_state(), r, depth=node.depth + 1, terminal=term, parent=node, untried=[])
            node.children[a] = child
            queue.append(child)

    # backward over the visit order so children are valued before parents
    for node in reversed(order + list(queue)):
        if node.children:
            node.average_return = max(c.immediate_return + gamma * c.average_return for c in node.children.values())
        else:
            node.average_return = 0.0
    root_values = {a: c.immediate_return + gamma * c.average_return for a, c in sorted(root.children.items())}
    best_a, best_v = 0, None
    for a, v in root_values.items():
        if best_v is None or v > best_v:
            best_a, best_v = a, v
    return BfsResult(best_a, root, used, root_values)


def bfs_plan(env: Environment, config: PlannerConfig = PlannerConfig(), state: EmulatorState | None = None) -> int:
    """Best root action by breadth-first search; ``env`` itself is not modified."""
    sim = env.clone()
    return bfs_search(sim, state if state is not None else env.save_state(), config).action

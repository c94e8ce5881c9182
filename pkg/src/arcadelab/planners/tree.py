"""Search-tree nodes and planner parameters shared by BFS and UCT."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..env.core import N_ACTIONS, EmulatorState


@dataclass(frozen=True)
class PlannerConfig:
    simulations: int = 500  # k
    max_depth_frames: int = 300  # m, in emulated frames
    exploration: float = 0.1  # C
    gamma: float = 0.999
    bfs_frame_budget: int = 133_000
    bfs_max_depth: int | None = None  # optional cap on BFS depth in decision steps
    ucb: str = "standard"  # standard | verbatim
    reuse: bool = True

    def __post_init__(self):
        if self.simulations < 1 or self.max_depth_frames < 1 or self.bfs_frame_budget < 1:
            raise ValueError("planner budgets must be positive")
        if self.exploration < 0 or not 0.0 <= self.gamma <= 1.0:
            raise ValueError("need exploration >= 0 and gamma in [0, 1]")
        if self.ucb not in ("standard", "verbatim"):
            raise ValueError(f"unknown UCB form {self.ucb!r}")
        if self.bfs_max_depth is not None and self.bfs_max_depth < 0:
            raise ValueError("bfs_max_depth must be non-negative")

    def depth_steps(self, frames_per_action: int) -> int:
        return max(1, self.max_depth_frames // frames_per_action)


@dataclass(eq=False)
class SearchNode:
    snapshot: EmulatorState
    immediate_return: float = 0.0
    visits: int = 0
    average_return: float = 0.0
    depth: int = 0
    terminal: bool = False
    parent: "SearchNode | None" = None
    children: dict[int, "SearchNode"] = field(default_factory=dict)
    untried: list[int] = field(default_factory=lambda: list(range(N_ACTIONS)))
    stops: int = 0  # samples whose descent ended at this node

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def distinct_children(self) -> list["SearchNode"]:
        """Children with aliases collapsed, in order of their lowest action."""
        seen, out = set(), []
        for a in sorted(self.children):
            c = self.children[a]
            if id(c) not in seen:
                seen.add(id(c))
                out.append(c)
        return out

    @property
    def branching(self) -> int:
        return len(self.distinct_children())

    def iter_subtree(self):
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(n.distinct_children())

    def size(self) -> int:
        return sum(1 for _ in self.iter_subtree())

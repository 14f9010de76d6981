"""Backward reachability, attractors and lockstep forward searches.

Each primitive has a symbolic form (driven through a :class:`SymbolicEngine`,
charging the ledger) and an explicit twin over Python sets that costs nothing
on the ledger.

Attractors are taken in the sub-MDP induced by ``live``: edges leaving
``live`` are dropped for the owner that needs *all* of its edges to enter the
attractor. ``live`` must be closed under successors of the other owner (for
the random attractor: no live random state has a successor outside ``live``),
which is how every solver calls them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Collection, Container, Iterable

from .engine import StateSet, SymbolicEngine
from .model import MdpGraph


@dataclass
class LockstepOutcome:
    """Result of a lockstep search.

    ``source``/``trap`` are set when some search closed without meeting the
    stop set (``TrapFound``); both are None when every search met it.
    """

    source: int | None = None
    trap: Any = None
    rounds: int = 0
    progress: dict[int, int] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.source is not None


# symbolic


def reach_backward(live: StateSet, target: StateSet, engine: SymbolicEngine) -> StateSet:
    """States of ``live`` with a path inside ``live`` to ``target``.

    Takes the image of the newest layer only; this equals the image of the
    whole set since older layers' predecessors are already included.
    """
    reached = target
    frontier = target
    while True:
        new = (engine.pre(frontier) & live) - reached
        if not new:
            return reached
        reached = reached | new
        frontier = new


def _attractor(live, seed, engine, cpre) -> StateSet:
    dead = engine.full() - live
    x = seed
    while True:
        y = x | (cpre(x | dead) & live)
        if y == x:
            return x
        x = y


def attr_random(live: StateSet, seed: StateSet, engine: SymbolicEngine) -> StateSet:
    """Random attractor of ``seed`` in the sub-MDP on ``live``."""
    return _attractor(live, seed, engine, engine.cpre)


def attr_player1(live: StateSet, seed: StateSet, engine: SymbolicEngine) -> StateSet:
    """Player-1 attractor of ``seed`` in the sub-MDP on ``live``."""
    return _attractor(live, seed, engine, engine.cpre1)


def lockstep_forward_symbolic(
    live: StateSet, sources: Iterable[int], stop: StateSet, engine: SymbolicEngine
) -> LockstepOutcome:
    """One ``post`` per active source per round, sources in ascending order.

    A search is dropped once its reached set meets ``stop``; the first one to
    reach a fixpoint without meeting ``stop`` is returned as the trap.
    """
    out = LockstepOutcome()
    searches = {}
    for s in sorted(set(sources)):
        out.progress[s] = 0
        p = engine.singleton(s)
        if not p & stop:
            searches[s] = (p, p)
    while searches:
        out.rounds += 1
        for s in list(searches):
            reached, frontier = searches[s]
            new = (engine.post(frontier) & live) - reached
            out.progress[s] += 1
            if not new:
                out.source, out.trap = s, reached
                return out
            reached = reached | new
            if new & stop:
                del searches[s]
            else:
                searches[s] = (reached, new)
    return out


# explicit twins


class Complement:
    """Container holding every state not in ``excluded``."""

    def __init__(self, excluded: Container[int]):
        self.excluded = excluded

    def __contains__(self, s: int) -> bool:
        return s not in self.excluded


def reach_backward_explicit(g: MdpGraph, live: Container[int], target: Iterable[int]) -> set[int]:
    reached = set(target)
    stack = list(reached)
    while stack:
        v = stack.pop()
        for u in g.pred[v]:
            if u in live and u not in reached:
                reached.add(u)
                stack.append(u)
    return reached


def _attractor_explicit(g: MdpGraph, live, seed, existential_is_player1: bool) -> set[int]:
    attr = set(seed)
    queue = list(attr)
    missing: dict[int, int] = {}  # universal states: live successors not yet processed in attr
    while queue:
        v = queue.pop()
        for u in g.pred[v]:
            if u in attr or u not in live:
                continue
            if g.player1[u] == existential_is_player1:
                attr.add(u)
                queue.append(u)
                continue
            left = missing.get(u)
            if left is None:
                left = sum(1 for t in g.succ[u] if t in live)
            left -= 1
            missing[u] = left
            if left == 0:
                attr.add(u)
                queue.append(u)
    return attr


def attr_random_explicit(g: MdpGraph, live: Container[int], seed: Iterable[int]) -> set[int]:
    return _attractor_explicit(g, live, seed, existential_is_player1=False)


def attr_player1_explicit(g: MdpGraph, live: Container[int], seed: Iterable[int]) -> set[int]:
    return _attractor_explicit(g, live, seed, existential_is_player1=True)


class _Dfs:
    """Iterative DFS advanced one edge traversal at a time."""

    def __init__(self, g: MdpGraph, live: Container[int], root: int):
        self.g = g
        self.live = live
        self.visited = {root}
        self.stack = [[root, 0]]
        self.edges = 0
        self._unwind()

    def _unwind(self) -> None:
        # pop exhausted frames and skip edges leaving the live subgraph (free)
        succ, live = self.g.succ, self.live
        while self.stack:
            frame = self.stack[-1]
            nbrs = succ[frame[0]]
            i = frame[1]
            while i < len(nbrs) and nbrs[i] not in live:
                i += 1
            frame[1] = i
            if i < len(nbrs):
                return
            self.stack.pop()

    @property
    def done(self) -> bool:
        return not self.stack

    def step(self, stop: Container[int]) -> bool:
        """Traverse one edge; True if it discovered a state of ``stop``."""
        frame = self.stack[-1]
        t = self.g.succ[frame[0]][frame[1]]
        frame[1] += 1
        self.edges += 1
        hit = False
        if t not in self.visited:
            self.visited.add(t)
            if t in stop:
                hit = True
            else:
                self.stack.append([t, 0])
        self._unwind()
        return hit


def lockstep_dfs_explicit(
    g: MdpGraph, live: Container[int], sources: Iterable[int], stop: Collection[int]
) -> LockstepOutcome:
    """Lockstep DFSs from ``sources``: one edge per active DFS per round.

    A DFS that discovers a ``stop`` state is dropped. The first DFS to finish
    without touching ``stop`` yields its visited set as the trap.
    """
    out = LockstepOutcome()
    searches = {}
    for s in sorted(set(sources)):
        out.progress[s] = 0
        if s in stop:
            continue
        dfs = _Dfs(g, live, s)
        if dfs.done:
            out.source, out.trap = s, frozenset(dfs.visited)
            return out
        searches[s] = dfs
    while searches:
        out.rounds += 1
        for s in list(searches):
            dfs = searches[s]
            hit = dfs.step(stop)
            out.progress[s] = dfs.edges
            if hit:
                del searches[s]
            elif dfs.done:
                out.source, out.trap = s, frozenset(dfs.visited)
                return out
    return out

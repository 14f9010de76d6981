"""Explicit-graph almost-sure Büchi solvers and the brute-force oracle.

All solvers return the set of states from which player 1 can visit the
target infinitely often with probability 1. The classical loop and the
``√m``-threshold variant return a :class:`WinningSet`; the bottom-SCC
classifiers stream Win/Lose verdicts as they are discovered.
"""
from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .fixpoints import (
    Complement,
    attr_player1_explicit,
    attr_random_explicit,
    lockstep_dfs_explicit,
    reach_backward_explicit,
)
from .model import MdpGraph, MemorylessStrategy
from .scc import tarjan

ORACLE_LIMIT = 10**6


class OracleTooLarge(ValueError):
    pass


def ceil_sqrt(m: int) -> int:
    return math.isqrt(m - 1) + 1 if m > 0 else 0


@dataclass
class WinningSet:
    states: frozenset[int]
    strategy: MemorylessStrategy
    trace: list[dict] = field(default_factory=list)

    @property
    def case1_count(self) -> int:
        return sum(1 for t in self.trace if t["case"] == 1)


@dataclass(frozen=True)
class Verdict:
    iteration: int
    verdict: str  # "win" or "lose"
    states: tuple[int, ...]


@dataclass
class VerdictStream:
    """Win/Lose events in emission order."""

    events: list[Verdict] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)

    def emit(self, iteration: int, verdict: str, states: Iterable[int]) -> None:
        states = tuple(sorted(states))
        if states:
            self.events.append(Verdict(iteration, verdict, states))

    def winning(self) -> frozenset[int]:
        return frozenset(s for e in self.events if e.verdict == "win" for s in e.states)

    def losing(self) -> frozenset[int]:
        return frozenset(s for e in self.events if e.verdict == "lose" for s in e.states)

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps({"iteration": e.iteration, "verdict": e.verdict, "states": list(e.states)}) + "\n"
            for e in self.events
        )


def witness_strategy(g: MdpGraph, winning: Iterable[int], target: Iterable[int]) -> MemorylessStrategy:
    """Shortest-path strategy to ``target`` inside ``winning``.

    Player-1 states outside the target move to a successor one step closer;
    player-1 target states move to their smallest successor inside ``winning``.
    """
    win = set(winning)
    dist = {t: 0 for t in sorted(set(target) & win)}
    queue = deque(dist)
    while queue:
        v = queue.popleft()
        for u in g.pred[v]:
            if u in win and u not in dist:
                if g.player1[u] or all(w in win for w in g.succ[u]):
                    dist[u] = dist[v] + 1
                    queue.append(u)
    choice = {}
    for s in sorted(win):
        if not g.player1[s]:
            continue
        inside = [t for t in g.succ[s] if t in win]
        if not inside:
            continue
        if dist.get(s) == 0 or s not in dist:
            choice[s] = inside[0]
        else:
            choice[s] = min((t for t in inside if dist.get(t) == dist[s] - 1))
    return MemorylessStrategy(choice)


def check_witness(g: MdpGraph, winning: Iterable[int], target: Iterable[int], strategy: MemorylessStrategy) -> list[str]:
    """Check the strategy restricted graph: random edges stay inside and every state reaches the target."""
    win = set(winning)
    errors = strategy.check(g)
    succ = {}
    for s in win:
        if g.player1[s]:
            t = strategy.choice.get(s)
            if t not in win:
                errors.append(f"state {s}: strategy leaves the winning set")
                continue
            succ[s] = (t,)
        else:
            out = [t for t in g.succ[s] if t not in win]
            if out:
                errors.append(f"state {s}: random edge to {out[0]} leaves the winning set")
            succ[s] = g.succ[s]
    pred: dict[int, list[int]] = {s: [] for s in win}
    for s, ts in succ.items():
        for t in ts:
            if t in pred:
                pred[t].append(s)
    seen = set(win) & set(target)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for u in pred[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    for s in sorted(win - seen):
        errors.append(f"state {s}: cannot reach the target under the strategy")
    return errors


def _result(g: MdpGraph, live: set[int], target: set[int], trace: list[dict]) -> WinningSet:
    return WinningSet(frozenset(live), witness_strategy(g, live, target), trace)


def classical_explicit(g: MdpGraph, target: Iterable[int]) -> WinningSet:
    """Repeatedly remove the random attractor of states that cannot reach the target."""
    target = set(target)
    live = set(range(g.n))
    trace = []
    while True:
        reach = reach_backward_explicit(g, live, target & live)
        bad = live - reach
        trace.append({"case": 1, "live": len(live), "removed_seed": len(bad)})
        if not bad:
            break
        live -= attr_random_explicit(g, live, bad)
    return _result(g, live, target, trace)


def impr_algo(g: MdpGraph, target: Iterable[int]) -> WinningSet:
    """Classical loop that replaces full reachability by lockstep DFSs while few states lost edges.

    Case 1 (first iteration, or more than ``⌈√m⌉`` states lost an edge since
    the last Case 1) runs full backward reachability. Case 2 runs lockstep
    DFSs from those states and removes the first closed set missing the target.
    """
    target = set(target)
    k = ceil_sqrt(g.m)
    live = set(range(g.n))
    removed_since_case1: set[int] = set()
    lost_edge: set[int] = set()
    trace = []
    i = 0
    while True:
        t_live = target & live
        if i == 0 or len(lost_edge) > k:
            reach = reach_backward_explicit(g, live, t_live)
            bad = live - reach
            trace.append({"case": 1, "live": len(live), "sources": len(lost_edge)})
            if not bad:
                break
            removed = attr_random_explicit(g, live, bad)
            removed_since_case1 = set(removed)
        else:
            out = lockstep_dfs_explicit(g, live, lost_edge, t_live)
            trace.append({"case": 2, "live": len(live), "sources": len(lost_edge), "rounds": out.rounds})
            if not out.found:
                break
            removed = attr_random_explicit(g, live, out.trap)
            removed_since_case1 |= removed
        live -= removed
        # states that lost an edge into a removed state since the last Case 1
        lost_edge = (lost_edge - removed) | {u for v in removed for u in g.pred[v] if u in live}
        i += 1
    return _result(g, live, target, trace)


class _Classifier:
    """Shared W1/W2 bookkeeping of the bottom-SCC classifiers."""

    def __init__(self, g: MdpGraph, target: set[int]):
        self.g = g
        self.target = target
        self.w1: set[int] = set()
        self.w2: set[int] = set()
        self.stream = VerdictStream()
        self.iteration = 0

    def decided(self, s: int) -> bool:
        return s in self.w1 or s in self.w2

    def is_bottom(self, comp: frozenset[int]) -> bool:
        return all(v in comp or self.decided(v) for u in comp for v in self.g.succ[u])

    def wins(self, comp: frozenset[int]) -> bool:
        return bool(comp & self.target) or any(v in self.w1 for u in comp for v in self.g.succ[u])

    def settle(self, bottoms: list[frozenset[int]]) -> set[int]:
        """Classify bottom SCCs, close both sides under attractors, emit events."""
        self.iteration += 1
        win_seed, lose_seed = set(), set()
        for c in bottoms:
            (win_seed if self.wins(c) else lose_seed).update(c)
        new_win = attr_player1_explicit(self.g, Complement(self.w1), win_seed) if win_seed else set()
        new_lose = attr_random_explicit(self.g, Complement(self.w2), lose_seed) if lose_seed else set()
        self.w1 |= new_win
        self.w2 |= new_lose
        self.stream.emit(self.iteration, "win", new_win)
        self.stream.emit(self.iteration, "lose", new_lose)
        return new_win | new_lose


def _regions(g: MdpGraph, bottom_up: bool) -> list[list[int]]:
    if not bottom_up:
        return [list(range(g.n))]
    comps = tarjan(g.succ, range(g.n))
    comp_of = {}
    for i, c in enumerate(comps):
        for v in c:
            comp_of[v] = i
    # tarjan emits sinks first, so successor levels are known when visited
    level = [0] * len(comps)
    for i, c in enumerate(comps):
        succ_levels = [level[comp_of[v]] + 1 for u in c for v in g.succ[u] if comp_of[v] != i]
        level[i] = max(succ_levels, default=0)
    order = sorted(range(len(comps)), key=lambda i: (level[i], min(comps[i])))
    return [sorted(comps[i]) for i in order]


def _region_edges(g: MdpGraph, region: list[int]) -> int:
    members = set(region)
    return sum(1 for u in region for v in g.succ[u] if v in members)


def win_lose(g: MdpGraph, target: Iterable[int], bottom_up: bool = True) -> VerdictStream:
    """Classify all bottom SCCs of the undecided graph, repeatedly.

    With ``bottom_up`` the loop runs per SCC of the input, sinks first, so each
    decomposition only touches one input SCC.
    """
    cl = _Classifier(g, set(target))
    for region in _regions(g, bottom_up):
        while True:
            live = [s for s in region if not cl.decided(s)]
            if not live:
                break
            member = set(live)
            comps = [frozenset(c) for c in tarjan(g.succ, live, member.__contains__)]
            bottoms = sorted((c for c in comps if cl.is_bottom(c)), key=min)
            cl.stream.trace.append({"case": 1, "live": len(live), "bottoms": len(bottoms)})
            cl.settle(bottoms)
    return cl.stream


def impr_win_lose(g: MdpGraph, target: Iterable[int], bottom_up: bool = True) -> VerdictStream:
    """Bottom-SCC classifier using lockstep DFSs while few states lost edges.

    Case 2 runs lockstep DFSs from the states that lost an edge; the first DFS
    to finish has explored a bottom SCC of the undecided graph.
    """
    cl = _Classifier(g, set(target))
    for region in _regions(g, bottom_up):
        k = ceil_sqrt(_region_edges(g, region) if bottom_up else g.m)
        live = {s for s in region if not cl.decided(s)}
        removed_since_case1: set[int] = set()
        lost_edge: set[int] = set()
        i = 0
        while live:
            if i == 0 or len(lost_edge) > k:
                comps = [frozenset(c) for c in tarjan(g.succ, sorted(live), live.__contains__)]
                bottoms = sorted((c for c in comps if cl.is_bottom(c)), key=min)
                cl.stream.trace.append({"case": 1, "live": len(live), "sources": len(lost_edge)})
                removed = cl.settle(bottoms)
                removed_since_case1 = set(removed)
            else:
                out = lockstep_dfs_explicit(g, live, lost_edge, ())
                cl.stream.trace.append({"case": 2, "live": len(live), "sources": len(lost_edge), "rounds": out.rounds})
                if not out.found:
                    # every new bottom SCC has an edge into a removed state
                    raise RuntimeError("lockstep search found no bottom SCC")
                removed = cl.settle([out.trap])
                removed_since_case1 |= removed
            live -= removed
            lost_edge = (lost_edge - removed) | {u for v in removed for u in g.pred[v] if u in live}
            i += 1
    return cl.stream


def _reach_masks(adj: list[int], n: int) -> list[int]:
    reach = [adj[v] | (1 << v) for v in range(n)]
    changed = True
    while changed:
        changed = False
        for v in range(n):
            r = reach[v]
            acc = r
            bits = r
            while bits:
                low = bits & -bits
                acc |= reach[low.bit_length() - 1]
                bits ^= low
            if acc != r:
                reach[v] = acc
                changed = True
    return reach


def oracle_almost_sure(g: MdpGraph, target: Iterable[int], limit: int = ORACLE_LIMIT) -> WinningSet:
    """Enumerate pure memoryless strategies and test each induced chain.

    Under a fixed strategy a state wins iff every bottom SCC reachable from it
    meets the target. The result is the union over strategies.
    """
    target = set(target)
    p1 = g.player1_states
    size = math.prod(len(g.succ[s]) for s in p1)
    if size > limit:
        raise OracleTooLarge(f"{size} strategies exceed the limit {limit}")
    n = g.n
    full = (1 << n) - 1
    tmask = sum(1 << t for t in target)
    base = [sum(1 << v for v in g.succ[s]) for s in range(n)]
    won = 0
    for picks in itertools.product(*(g.succ[s] for s in p1)):
        adj = list(base)
        for s, t in zip(p1, picks):
            adj[s] = 1 << t
        reach = _reach_masks(adj, n)
        back = [0] * n
        for u in range(n):
            bits = reach[u]
            while bits:
                low = bits & -bits
                back[low.bit_length() - 1] |= 1 << u
                bits ^= low
        bad = 0
        for v in range(n):
            if reach[v] & ~back[v] == 0 and reach[v] & tmask == 0:
                bad |= 1 << v
        for s in range(n):
            if reach[s] & bad == 0:
                won |= 1 << s
        if won == full:
            break
    states = {s for s in range(n) if (won >> s) & 1}
    return WinningSet(frozenset(states), witness_strategy(g, states, target))

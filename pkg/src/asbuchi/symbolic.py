"""Symbolic almost-sure Büchi solvers on :class:`SymbolicEngine`.

Each solver returns a :class:`SymbolicSolveReport` holding the winning set,
the ledger of image steps spent, and a per-iteration trace.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .engine import Exact, StateSet, StepLedger, SymbolicEngine
from .explicit import Verdict, VerdictStream, ceil_sqrt
from .fixpoints import attr_player1, attr_random, lockstep_forward_symbolic, reach_backward
from .model import MdpGraph
from .scc import improved_scc_find


@dataclass
class SymbolicSolveReport:
    algorithm: str
    winning: StateSet
    ledger: StepLedger
    trace: list[dict] = field(default_factory=list)

    def winning_ids(self) -> list[int]:
        return self.winning.engine.ids(self.winning)

    @property
    def case1_count(self) -> int:
        return sum(1 for t in self.trace if t["case"] == 1)


def _setup(g: MdpGraph, target: Iterable[int], engine: SymbolicEngine | None):
    eng = engine if engine is not None else SymbolicEngine(g)
    before = eng.ledger.snapshot()
    return eng, eng.from_ids(target), before


def _report(name, eng, winning, before, trace) -> SymbolicSolveReport:
    return SymbolicSolveReport(name, winning, eng.ledger - before, trace)


def symb_classical(g: MdpGraph, target: Iterable[int], engine: SymbolicEngine | None = None) -> SymbolicSolveReport:
    """Backward reachability then random-attractor removal, until nothing is removed."""
    eng, t_all, before = _setup(g, target, engine)
    live = eng.full()
    trace = []
    while True:
        reach = reach_backward(live, t_all & live, eng)
        bad = live - reach
        trace.append({"case": 1, "live": live.size, "removed_seed": bad.size})
        if not bad:
            break
        live = live - attr_random(live, bad, eng)
    return _report("symb-classical", eng, live, before, trace)


def symb_impr_algo(g: MdpGraph, target: Iterable[int], engine: SymbolicEngine | None = None) -> SymbolicSolveReport:
    """Symbolic threshold variant: lockstep forward searches while few states lost edges."""
    eng, t_all, before = _setup(g, target, engine)
    k = ceil_sqrt(g.m)
    live = eng.full()
    lost_edge = eng.empty()
    trace = []
    i = 0
    while True:
        t_live = t_all & live
        verdict = eng.count_at_most(lost_edge, k) if i > 0 else None
        if not isinstance(verdict, Exact):
            reach = reach_backward(live, t_live, eng)
            bad = live - reach
            trace.append({"case": 1, "live": live.size, "sources": lost_edge.size})
            if not bad:
                break
            removed = attr_random(live, bad, eng)
        else:
            out = lockstep_forward_symbolic(live, verdict.members, t_live, eng)
            trace.append({"case": 2, "live": live.size, "sources": verdict.count, "rounds": out.rounds})
            if not out.found:
                break
            removed = attr_random(live, out.trap, eng)
        live = live - removed
        lost_edge = (lost_edge - removed) | (eng.pre(removed) & live)
        i += 1
    return _report("symb-impr", eng, live, before, trace)


def _dovetail(live, sources, reach, reach_front, eng):
    """Lockstep forward searches, each post paired with one backward step of ``reach``.

    Returns ``(kind, trap, reach, reach_front)`` where kind is ``"fixpoint"``
    (``reach`` is closed), ``"trap"`` or ``"all"`` (every search met ``reach``).
    """
    searches = {}
    for s in sorted(sources):
        p = eng.singleton(s)
        if not p & reach:
            searches[s] = (p, p)
    while searches:
        for s in list(searches):
            found, front = searches[s]
            new = (eng.post(front) & live) - found
            grown = (eng.pre(reach_front) & live) - reach
            if not grown:
                return "fixpoint", None, reach, reach_front
            reach = reach | grown
            reach_front = grown
            if not new:
                return "trap", found, reach, reach_front
            found = found | new
            if found & reach:
                del searches[s]
            else:
                searches[s] = (found, new)
    return "all", None, reach, reach_front


def smdv_symb_impr_algo(g: MdpGraph, target: Iterable[int], engine: SymbolicEngine | None = None) -> SymbolicSolveReport:
    """Threshold variant whose lockstep searches are dovetailed with backward reachability.

    A reachability set ``U`` grows by one ``pre`` per forward ``post``. A search
    stops once it meets ``U``; if ``U`` closes first, everything outside it is
    removed as in the classical step. ``U`` is kept across Case-2 iterations
    while removals miss it, and restarts from the live targets otherwise.
    """
    eng, t_all, before = _setup(g, target, engine)
    k = ceil_sqrt(g.m)
    live = eng.full()
    lost_edge = eng.empty()
    reach = reach_front = None
    trace = []
    i = 0
    while True:
        t_live = t_all & live
        verdict = eng.count_at_most(lost_edge, k) if i > 0 else None
        if not isinstance(verdict, Exact):
            full_reach = reach_backward(live, t_live, eng)
            bad = live - full_reach
            trace.append({"case": 1, "live": live.size, "sources": lost_edge.size})
            if not bad:
                break
            removed = attr_random(live, bad, eng)
            reach = reach_front = None
        else:
            if reach is None:
                reach = reach_front = t_live
            kind, trap, reach, reach_front = _dovetail(live, verdict.members, reach, reach_front, eng)
            trace.append({"case": 2, "live": live.size, "sources": verdict.count, "outcome": kind})
            if kind == "all":
                break
            if kind == "fixpoint":
                bad = live - reach
                if not bad:
                    break
                removed = attr_random(live, bad, eng)
                reach = reach_front = None
            else:
                removed = attr_random(live, trap, eng)
                if removed & reach:
                    reach = reach_front = None
        live = live - removed
        lost_edge = (lost_edge - removed) | (eng.pre(removed) & live)
        i += 1
    return _report("smdv", eng, live, before, trace)


def _lockstep_bottom_scc(live: StateSet, sources, eng: SymbolicEngine) -> StateSet | None:
    """First bottom SCC certified by per-source forward and backward searches.

    Each round, each active source takes one ``post`` (until its forward set
    closes) then one ``pre``. Once the forward set F closes, the backward set
    is confined to F; F is a bottom SCC as soon as it lies inside the backward
    set. A source is dropped when its backward set closes short of F.
    """
    state = {}
    for s in sorted(sources):
        x = eng.singleton(s)
        # forward set, forward frontier, forward closed, backward set, backward frontier, backward closed
        state[s] = [x, x, False, x, x, False]
    while state:
        for s in list(state):
            fw, ffront, fclosed, bw, bfront, bclosed = state[s]
            if not fclosed:
                new = (eng.post(ffront) & live) - fw
                if new:
                    fw, ffront = fw | new, new
                else:
                    fclosed = True
                    # states outside the closed F have no predecessors in F
                    bw, bfront = bw & fw, bfront & fw
                    if not bfront:
                        bclosed = True
            if fclosed and fw <= bw:
                return fw
            if not bclosed:
                region = fw if fclosed else live
                grown = (eng.pre(bfront) & region) - bw
                if grown:
                    bw, bfront = bw | grown, grown
                else:
                    bclosed = True
            if fclosed and fw <= bw:
                return fw
            if fclosed and bclosed:
                del state[s]
                continue
            state[s] = [fw, ffront, fclosed, bw, bfront, bclosed]
    return None


def symb_impr_win_lose(
    g: MdpGraph, target: Iterable[int], engine: SymbolicEngine | None = None
) -> tuple[VerdictStream, SymbolicSolveReport]:
    """Symbolic bottom-SCC classifier with the threshold rule.

    Case 1 decomposes the undecided graph and classifies every bottom SCC;
    Case 2 certifies one bottom SCC by lockstep searches from the states that
    lost an edge. Wins close under the player-1 attractor, losses under the
    random attractor.
    """
    eng, t_all, before = _setup(g, target, engine)
    k = ceil_sqrt(g.m)
    full = eng.full()
    live = full
    w1 = eng.empty()
    w2 = eng.empty()
    lost_edge = eng.empty()
    stream = VerdictStream()
    trace = stream.trace
    i = 0
    while live:
        verdict = eng.count_at_most(lost_edge, k) if i > 0 else None
        if not isinstance(verdict, Exact):
            part = improved_scc_find(eng, live)
            candidates = [eng.from_ids(c) for c in part.sccs]
            case = 1
        else:
            comp = _lockstep_bottom_scc(live, verdict.members, eng)
            if comp is None:
                raise RuntimeError("lockstep search found no bottom SCC")
            candidates = [comp]
            case = 2
        win_seed = eng.empty()
        lose_seed = eng.empty()
        bottoms = 0
        for c in candidates:
            succ = eng.post(c)
            if not (succ & live) <= c:
                continue
            bottoms += 1
            if c & t_all or succ & w1:
                win_seed = win_seed | c
            else:
                lose_seed = lose_seed | c
        trace.append({"case": case, "live": live.size, "sources": lost_edge.size, "bottoms": bottoms})
        new_win = attr_player1(full - w1, win_seed, eng) if win_seed else win_seed
        new_lose = attr_random(full - w2, lose_seed, eng) if lose_seed else lose_seed
        w1 = w1 | new_win
        w2 = w2 | new_lose
        stream.emit(i + 1, "win", eng.ids(new_win))
        stream.emit(i + 1, "lose", eng.ids(new_lose))
        removed = new_win | new_lose
        live = live - removed
        lost_edge = (lost_edge - removed) | (eng.pre(removed) & live)
        i += 1
    return stream, _report("symb-impr-win-lose", eng, w1, before, trace)


__all__ = [
    "SymbolicSolveReport",
    "Verdict",
    "smdv_symb_impr_algo",
    "symb_classical",
    "symb_impr_algo",
    "symb_impr_win_lose",
]

"""Strongly connected components: explicit oracle and two symbolic algorithms.

``scc_find`` is the skeleton-based linear-step decomposition (forward set,
skeleton of the forward set, backward closure, two recursive calls carrying a
spine-set). ``improved_scc_find`` additionally intersects the forward set with
the incoming spine (``P``), stops rebuilding the skeleton once it reaches
``P`` and seeds the backward closure with ``P``.

Both run on an explicit work stack and charge their image calls to the
engine's ledger.
"""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .engine import StateSet, SymbolicEngine
from .model import Digraph

DIAMETER_CAP = 2000


@dataclass
class SccPartition:
    """SCCs in discovery order, with bottom flags and optional diameters.

    ``is_bottom`` is relative to the decomposed (sub)graph. ``spine_insertions``
    counts, per state, how often a symbolic run put it into a NewSet while it
    was not already on the incoming spine.
    """

    sccs: list[frozenset[int]]
    is_bottom: list[bool]
    diameters: list[int | None] | None = None
    spine_insertions: Counter = field(default_factory=Counter)

    @property
    def count(self) -> int:
        return len(self.sccs)

    @property
    def d_star(self) -> int | None:
        if self.diameters is None or any(d is None for d in self.diameters):
            return None
        return sum(self.diameters)

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        """Partition as sorted tuples ordered by smallest member."""
        return tuple(sorted(tuple(sorted(c)) for c in self.sccs))

    def result_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.canonical()).encode()).hexdigest()

    def to_json(self) -> str:
        return json.dumps(
            {
                "sccs": [sorted(c) for c in self.sccs],
                "is_bottom": self.is_bottom,
                "diameters": self.diameters,
            }
        )


def tarjan(succ: Sequence[Sequence[int]], nodes: Iterable[int], member=None) -> list[list[int]]:
    """Iterative Tarjan on the subgraph induced by ``nodes``.

    ``member`` tests membership (defaults to a set of ``nodes``). SCCs come out
    in reverse topological order (sinks first).
    """
    nodes = list(nodes)
    if member is None:
        member = set(nodes).__contains__
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(succ[root]))]
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                if not member(w):
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    pushed = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def _bottom_flags(g: Digraph, sccs: Sequence[frozenset[int]], member) -> list[bool]:
    flags = []
    for c in sccs:
        flags.append(all(v in c for u in c for v in g.succ[u] if member(v)))
    return flags


def scc_explicit(g: Digraph, nodes: Iterable[int] | None = None) -> SccPartition:
    """Linear-time decomposition; SCCs ordered by smallest member."""
    if nodes is None:
        nodes = range(g.n)
        member = lambda v: True  # noqa: E731
    else:
        nodes = sorted(nodes)
        member = set(nodes).__contains__
    comps = sorted((frozenset(c) for c in tarjan(g.succ, nodes, member)), key=min)
    return SccPartition(comps, _bottom_flags(g, comps, member))


# symbolic


@dataclass
class SkelFwdResult:
    fwset: StateSet
    newset: StateSet
    newstate: StateSet
    p: StateSet | None = None


def _skel_fwd(engine: SymbolicEngine, live: StateSet, s: StateSet, q: StateSet | None) -> SkelFwdResult:
    layers = []
    fw = engine.empty()
    layer = s
    while layer:
        layers.append(layer)
        fw = fw | layer
        layer = (engine.post(layer) & live) - fw
    p = fw & q if q is not None else None
    newstate = engine.pick(layers.pop())
    newset = last = newstate
    while layers:
        layer = layers.pop()
        if p is not None and layer & p:
            break
        # pre(NewSet) and pre(last) agree on this layer: older skeleton states
        # lie at least two layers further out
        last = engine.pick(engine.pre(last) & layer)
        newset = newset | last
    return SkelFwdResult(fw, newset, newstate, p)


def skel_fwd(live: StateSet, s: int, engine: SymbolicEngine) -> SkelFwdResult:
    """Forward set of ``s`` inside ``live`` and a skeleton of it."""
    return _skel_fwd(engine, live, engine.singleton(s), None)


def improved_skel_fwd(live: StateSet, q: StateSet, s: int, engine: SymbolicEngine) -> SkelFwdResult:
    """As :func:`skel_fwd`, stopping the skeleton once it reaches ``FW ∩ q``."""
    return _skel_fwd(engine, live, engine.singleton(s), q)


CallHook = Callable[[StateSet, StateSet, StateSet, SkelFwdResult, StateSet], None]


def _decompose(
    engine: SymbolicEngine,
    universe: StateSet | None,
    improved: bool,
    on_call: CallHook | None = None,
) -> SccPartition:
    live = engine.full() if universe is None else universe
    sccs: list[frozenset[int]] = []
    inserted: Counter = Counter()
    work = [(live, engine.empty(), engine.empty())]
    while work:
        region, spine, end = work.pop()
        if not region:
            continue
        if not spine or not end:
            end = engine.pick(region)
        res = _skel_fwd(engine, region, end, spine if improved else None)
        comp = (res.p | end) if improved else end
        frontier = comp
        while True:
            new = (engine.pre(frontier) & res.fwset) - comp
            if not new:
                break
            comp = comp | new
            frontier = new
        if on_call is not None:
            on_call(region, spine, end, res, comp)
        sccs.append(frozenset(engine.ids(comp)))
        inserted.update(engine.ids(res.newset - spine))
        # the spine end passed to the outer call: a spine state entering the
        # SCC, restricted to the remaining spine so the pair stays a spine-set
        rest_spine = spine - comp
        rest_end = engine.pick(engine.pre(comp & spine) & rest_spine)
        inner = (res.fwset - comp, res.newset - comp, res.newstate - comp)
        outer = (region - res.fwset, rest_spine, rest_end)
        work.append(inner)
        work.append(outer)
    member = live.__contains__
    part = SccPartition(sccs, _bottom_flags(engine.graph, sccs, member))
    part.spine_insertions = inserted
    return part


def scc_find(engine: SymbolicEngine, universe: StateSet | None = None, on_call: CallHook | None = None) -> SccPartition:
    """Skeleton-based decomposition of the subgraph on ``universe``."""
    return _decompose(engine, universe, improved=False, on_call=on_call)


def improved_scc_find(
    engine: SymbolicEngine, universe: StateSet | None = None, on_call: CallHook | None = None
) -> SccPartition:
    """Decomposition with truncated skeletons and spine-seeded closures."""
    return _decompose(engine, universe, improved=True, on_call=on_call)


def eccentricity(g: Digraph, comp: frozenset[int], source: int) -> int:
    """Largest BFS distance from ``source`` inside ``comp``."""
    dist = {source: 0}
    frontier = [source]
    d = 0
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.succ[u]:
                if v in comp and v not in dist:
                    dist[v] = d + 1
                    nxt.append(v)
        if nxt:
            d += 1
        frontier = nxt
    return d


def scc_diameter(g: Digraph, comp: frozenset[int]) -> int:
    """Diameter of the subgraph induced by a strongly connected ``comp``."""
    if len(comp) == 1:
        return 0
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    order = sorted(comp)
    pos = {v: i for i, v in enumerate(order)}
    rows, cols = [], []
    for u in order:
        for v in g.succ[u]:
            if v in pos:
                rows.append(pos[u])
                cols.append(pos[v])
    k = len(order)
    mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(k, k))
    dist = shortest_path(mat, method="D", unweighted=True)
    return int(dist.max())


def scc_diameters(partition: SccPartition, g: Digraph, cap: int = DIAMETER_CAP) -> SccPartition:
    """Fill ``partition.diameters``; SCCs above ``cap`` states get None."""
    partition.diameters = [scc_diameter(g, c) if len(c) <= cap else None for c in partition.sccs]
    return partition

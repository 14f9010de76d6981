"""Seeded instance generators.

All randomness comes from numpy's Philox counter-based bit generator seeded
with a 64-bit integer, so a (params, seed) pair fully determines the output.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Digraph, MdpGraph


class GenError(ValueError):
    pass


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed & (2**64 - 1)))


@dataclass(frozen=True)
class GenParams:
    """Generator parameters; fields unused by a kind are ignored.

    ``m`` is the number of sampled edges before sink repair. ``layers`` and
    ``intra_degree``/``inter_density`` shape the layered SCC family.
    """

    kind: str = "mdp"  # mdp | layered-mdp | layered | digraph
    n: int = 10
    m: int = 20
    player1_fraction: float = 0.5
    target_fraction: float = 0.2
    layers: int = 1
    intra_degree: float = 1.0
    inter_density: float = 1.0
    self_loops: bool = True
    seed: int = 0

    def check(self, uses_m: bool = True) -> None:
        if self.n < 1:
            raise GenError("n must be at least 1")
        for name in ("player1_fraction", "target_fraction"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise GenError(f"{name}={v} outside [0, 1]")
        if uses_m and not 0 <= self.m <= self.n * self.n:
            raise GenError(f"m={self.m} infeasible for n={self.n}")


def _sample_edges(rng: np.random.Generator, n: int, m: int) -> list[tuple[int, int]]:
    codes = rng.choice(n * n, size=m, replace=False) if m else np.empty(0, dtype=np.int64)
    codes.sort()
    return [(int(c) // n, int(c) % n) for c in codes]


def _repair_sinks(rng: np.random.Generator, n: int, edges: list[tuple[int, int]]) -> list[tuple[int, int]]:
    has_out = np.zeros(n, dtype=bool)
    for u, _ in edges:
        has_out[u] = True
    for u in np.flatnonzero(~has_out).tolist():
        edges.append((u, int(rng.integers(n))))
    return edges


def gen_random_mdp(p: GenParams) -> MdpGraph:
    """Uniform random MDP: ``m`` distinct edges, fair owner coin, fixed target count."""
    p.check()
    rng = rng_for(p.seed)
    edges = _repair_sinks(rng, p.n, _sample_edges(rng, p.n, p.m))
    owners = rng.random(p.n) < p.player1_fraction
    k = int(round(p.target_fraction * p.n))
    target = rng.choice(p.n, size=k, replace=False).tolist() if k else []
    return MdpGraph.build(p.n, edges, np.flatnonzero(owners).tolist(), target)


def gen_digraph(p: GenParams) -> Digraph:
    """Uniform random digraph with ``m`` distinct edges (sinks allowed)."""
    p.check()
    return Digraph.from_edges(p.n, _sample_edges(rng_for(p.seed), p.n, p.m))


def perturb_mdp(g: MdpGraph, epsilon: float, seed: int) -> MdpGraph:
    """Rewire each edge with probability ``epsilon`` to a uniform head not already used by its tail."""
    if not 0 <= epsilon <= 1:
        raise GenError(f"epsilon={epsilon} outside [0, 1]")
    if epsilon == 0:
        return g
    rng = rng_for(seed)
    edges = []
    for u in range(g.n):
        heads = list(g.succ[u])
        used = set(heads)
        for i, v in enumerate(heads):
            if rng.random() >= epsilon:
                continue
            if len(used) == g.n:
                continue
            # uniform over v itself and states not used by another edge of u
            w = int(rng.integers(g.n))
            while w != v and w in used:
                w = int(rng.integers(g.n))
            used.discard(v)
            used.add(w)
            heads[i] = w
        edges.extend((u, v) for v in heads)
    edges = _repair_sinks(rng, g.n, edges)
    return MdpGraph.build(g.n, edges, g.player1_states, g.target)


def gen_layered_scc_graph(p: GenParams) -> tuple[Digraph, list[list[int]]]:
    """Digraph whose SCCs are prescribed layers, wired forward in layer order.

    State ids are shuffled, the shuffled order is cut into ``layers`` near-equal
    blocks; each block of two or more states gets a random Hamiltonian cycle
    plus ``intra_degree`` extra edges per state, singletons a self-loop when
    ``self_loops``. ``inter_density * n`` edges go from a layer to a later one.
    Returns the graph and the ground-truth partition.
    """
    p.check(uses_m=False)
    if not 1 <= p.layers <= p.n:
        raise GenError(f"layers={p.layers} infeasible for n={p.n}")
    rng = rng_for(p.seed)
    perm = rng.permutation(p.n)
    bounds = np.linspace(0, p.n, p.layers + 1).round().astype(int)
    blocks = [perm[bounds[i] : bounds[i + 1]] for i in range(p.layers)]
    layer_of = np.empty(p.n, dtype=np.int64)
    for i, b in enumerate(blocks):
        layer_of[b] = i
    edges: set[tuple[int, int]] = set()
    for b in blocks:
        k = len(b)
        if k == 1:
            if p.self_loops:
                edges.add((int(b[0]), int(b[0])))
            continue
        cyc = rng.permutation(b)
        edges.update((int(cyc[j]), int(cyc[(j + 1) % k])) for j in range(k))
        extra = int(round(p.intra_degree * k))
        if extra:
            us = rng.choice(b, size=extra)
            vs = rng.choice(b, size=extra)
            edges.update(zip(us.tolist(), vs.tolist()))
    if p.layers > 1:
        count = int(round(p.inter_density * p.n))
        us = rng.integers(0, p.n, size=count)
        vs = rng.integers(0, p.n, size=count)
        for u, v in zip(us.tolist(), vs.tolist()):
            lu, lv = layer_of[u], layer_of[v]
            if lu == lv:
                continue
            edges.add((u, v) if lu < lv else (v, u))
    truth = sorted(sorted(int(x) for x in b) for b in blocks)
    return Digraph.from_edges(p.n, sorted(edges)), truth


def gen_layered_mdp(p: GenParams) -> MdpGraph:
    """MDP on a layered SCC skeleton with about ``m`` edges.

    Uniform random MDPs are almost always trivial (everything or nothing
    wins); prescribing SCC layers yields many bottom SCCs and long attractor
    chains. After the per-layer cycles, the remaining edge budget is split
    evenly between intra-layer and forward inter-layer edges.
    """
    p.check()
    cyc = p.n if p.layers < p.n else (p.n if p.self_loops else 0)
    spare = max(p.m - cyc, 0)
    shape = GenParams(
        kind="layered",
        n=p.n,
        layers=p.layers,
        intra_degree=spare / 2 / p.n,
        inter_density=spare / 2 / p.n,
        self_loops=True,
        seed=p.seed,
    )
    d, _ = gen_layered_scc_graph(shape)
    rng = rng_for(p.seed ^ 0x5EED)
    owners = rng.random(p.n) < p.player1_fraction
    k = int(round(p.target_fraction * p.n))
    target = rng.choice(p.n, size=k, replace=False).tolist() if k else []
    return MdpGraph.build(p.n, d.edges(), np.flatnonzero(owners).tolist(), target)


def line_trap_mdp(n: int, sources: int) -> MdpGraph:
    """Player-1 sources each choosing between a losing trap and a long line to the target.

    States ``0..sources-1`` are the sources, the line occupies the next ids and
    ends in the target self-loop ``n-2``; ``n-1`` is the trap. Once the trap is
    removed, every source has lost an edge and a lockstep forward search from
    each one walks the whole line, while one backward sweep settles them all.
    """
    if sources < 1 or n < sources + 3:
        raise GenError(f"need n >= sources + 3, got n={n}, sources={sources}")
    line = list(range(sources, n - 2))
    goal, trap = n - 2, n - 1
    edges = [(s, line[0] if line else goal) for s in range(sources)]
    edges += [(s, trap) for s in range(sources)]
    edges += list(zip(line, line[1:] + [goal]))
    edges += [(goal, goal), (trap, trap)]
    return MdpGraph.build(n, edges, player1=range(sources), target=[goal])

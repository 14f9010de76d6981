import numpy as np
import pytest
from hypothesis import given
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from asbuchi import Digraph, SymbolicEngine, m1
from asbuchi.generators import GenParams, gen_digraph, gen_layered_scc_graph
from asbuchi.scc import (
    eccentricity,
    improved_scc_find,
    improved_skel_fwd,
    scc_diameter,
    scc_diameters,
    scc_explicit,
    scc_find,
    skel_fwd,
    tarjan,
)
from conftest import digraphs

SYMBOLIC = [scc_find, improved_scc_find]


def chain(n):
    return Digraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Digraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def ids(e, s):
    return set(e.ids(s))


def is_spine(g, members, end):
    """Some start reaches exactly ``members`` along a simple path ending at ``end``, without shortcuts."""
    members = set(members)
    if not members:
        return True
    if end not in members:
        return False
    for start in members:
        order, seen = [start], {start}
        while True:
            nxt = [v for v in g.succ[order[-1]] if v in members and v not in seen]
            if len(nxt) != 1:
                break
            order.append(nxt[0])
            seen.add(nxt[0])
        if seen == members and order[-1] == end:
            pos = {v: i for i, v in enumerate(order)}
            if all(pos[v] <= pos[u] + 1 for u in members for v in g.succ[u] if v in members):
                return True
    return False


def reach_matrix(g):
    r = np.eye(g.n, dtype=bool)
    for u in range(g.n):
        for v in g.succ[u]:
            r[u, v] = True
    for k in range(g.n):
        r |= r[:, k : k + 1] & r[k : k + 1, :]
    return r


# skeleton searches


def test_skel_fwd_chain():
    g = chain(5)
    e = SymbolicEngine(g)
    r = skel_fwd(e.full(), 0, e)
    assert ids(e, r.fwset) == ids(e, r.newset) == set(range(5))
    assert ids(e, r.newstate) == {4}


def test_skel_fwd_self_loop():
    g = Digraph.from_edges(1, [(0, 0)])
    e = SymbolicEngine(g)
    r = skel_fwd(e.full(), 0, e)
    assert ids(e, r.fwset) == ids(e, r.newset) == ids(e, r.newstate) == {0}


def test_skel_fwd_complete_graph():
    g = Digraph.from_edges(3, [(u, v) for u in range(3) for v in range(3) if u != v])
    e = SymbolicEngine(g)
    r = skel_fwd(e.full(), 0, e)
    assert ids(e, r.fwset) == {0, 1, 2}
    assert ids(e, r.newset) == {0, 1} and ids(e, r.newstate) == {1}


def test_improved_skel_fwd_stops_at_spine():
    g = chain(5)
    e = SymbolicEngine(g)
    r = improved_skel_fwd(e.full(), e.from_ids([2]), 0, e)
    assert ids(e, r.p) == {2}
    assert ids(e, r.newset) == {3, 4} and ids(e, r.newstate) == {4}


def test_improved_skel_fwd_source_on_spine():
    g = Digraph.from_edges(1, [(0, 0)])
    e = SymbolicEngine(g)
    r = improved_skel_fwd(e.full(), e.from_ids([0]), 0, e)
    assert ids(e, r.p) == ids(e, r.newset) == ids(e, r.newstate) == {0}


def test_skel_fwd_respects_live_set():
    g = chain(5)
    e = SymbolicEngine(g)
    r = skel_fwd(e.from_ids([0, 1, 3, 4]), 0, e)
    assert ids(e, r.fwset) == {0, 1} and ids(e, r.newstate) == {1}


# partitions


@pytest.mark.parametrize("fn", SYMBOLIC)
def test_cycle_is_one_scc(fn):
    part = fn(SymbolicEngine(cycle(7)))
    assert part.canonical() == (tuple(range(7)),) and part.is_bottom == [True]


@pytest.mark.parametrize("fn", SYMBOLIC)
def test_dag_gives_singletons(fn):
    g = Digraph.from_edges(5, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)])
    part = fn(SymbolicEngine(g))
    assert part.canonical() == tuple((i,) for i in range(5))
    assert [c for c, b in zip(part.sccs, part.is_bottom) if b] == [frozenset({4})]


@pytest.mark.parametrize("fn", [None] + SYMBOLIC)
def test_m1_partition(fn):
    g = m1()
    part = scc_explicit(g) if fn is None else fn(SymbolicEngine(g))
    assert part.canonical() == ((0, 1), (2,), (3,))
    bottoms = {tuple(sorted(c)) for c, b in zip(part.sccs, part.is_bottom) if b}
    assert bottoms == {(2,), (3,)}
    scc_diameters(part, g)
    assert dict(zip(map(min, part.sccs), part.diameters)) == {0: 1, 2: 0, 3: 0}


def test_sub_universe():
    g = m1()
    e = SymbolicEngine(g)
    part = improved_scc_find(e, e.from_ids([0, 1, 3]))
    assert part.canonical() == ((0, 1), (3,))
    assert {min(c): b for c, b in zip(part.sccs, part.is_bottom)} == {0: False, 3: True}


@given(digraphs())
def test_tarjan_matches_scipy(g):
    rows = [u for u, v in g.edges()]
    cols = [v for u, v in g.edges()]
    mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n))
    k, labels = connected_components(mat, directed=True, connection="strong")
    assert len(scc_explicit(g).sccs) == k
    expected = sorted(tuple(np.flatnonzero(labels == c).tolist()) for c in range(k))
    assert list(scc_explicit(g).canonical()) == expected


@given(digraphs())
def test_symbolic_partitions_match_reachability(g):
    r = reach_matrix(g)
    mutual = r & r.T
    expected = tuple(sorted({tuple(np.flatnonzero(mutual[v]).tolist()) for v in range(g.n)}))
    for fn in SYMBOLIC:
        part = fn(SymbolicEngine(g))
        assert part.canonical() == expected
        for c, bottom in zip(part.sccs, part.is_bottom):
            leaves = any(r[u, v] and v not in c for u in c for v in range(g.n))
            assert bottom == (not leaves)


@given(digraphs())
def test_tarjan_emits_sinks_first(g):
    order = tarjan(g.succ, range(g.n))
    pos = {v: i for i, c in enumerate(order) for v in c}
    assert all(pos[v] <= pos[u] for u, v in g.edges())


@given(digraphs())
def test_spines_and_closures(g):
    for fn in SYMBOLIC:
        e = SymbolicEngine(g)
        calls = []

        def hook(region, spine, end, res, comp):
            calls.append(1)
            sp, en = ids(e, spine), ids(e, end)
            assert sp <= ids(e, region)
            if sp:
                assert is_spine(g, sp, next(iter(en)))
            assert is_spine(g, ids(e, res.newset), next(iter(ids(e, res.newstate))))
            # the closure is exactly the component of the search start
            start = next(iter(en))
            sub = scc_explicit(g, ids(e, region))
            assert ids(e, comp) == next(set(c) for c in sub.sccs if start in c)

        part = fn(e, on_call=hook)
        assert len(calls) == part.count


@given(digraphs())
def test_each_state_joins_a_spine_at_most_once(g):
    for fn in SYMBOLIC:
        part = fn(SymbolicEngine(g))
        assert max(part.spine_insertions.values(), default=0) <= 1


@given(digraphs())
def test_improved_never_costs_more(g):
    a, b = SymbolicEngine(g), SymbolicEngine(g)
    scc_find(a)
    improved_scc_find(b)
    assert b.ledger.image_steps <= a.ledger.image_steps


@given(digraphs())
def test_step_bounds(g):
    n = g.n
    for fn in SYMBOLIC:
        e = SymbolicEngine(g)
        part = scc_diameters(fn(e), g)
        big_n, steps = part.count, e.ledger.image_steps
        assert steps <= 5 * n + 3 * big_n + 3
        if fn is improved_scc_find:
            assert steps <= 3 * n + big_n + 3 * big_n + 3


@pytest.mark.parametrize("n", [2, 6, 20, 50])
def test_chain_step_count_frozen(n):
    # singleton components each cost a forward step, a closure confirmation and a skeleton step
    e = SymbolicEngine(chain(n))
    part = improved_scc_find(e)
    assert part.count == n
    assert e.ledger.image_steps == 5 * n - 2


@pytest.mark.parametrize("seed", range(6))
def test_layered_ground_truth(seed):
    g, truth = gen_layered_scc_graph(GenParams(n=300, layers=30, intra_degree=0.5, seed=seed))
    want = tuple(tuple(c) for c in truth)
    assert scc_explicit(g).canonical() == want
    for fn in SYMBOLIC:
        assert fn(SymbolicEngine(g)).canonical() == want


def test_larger_random_graphs_agree():
    for seed in range(4):
        g = gen_digraph(GenParams(n=1500, m=2250, seed=seed))
        want = scc_explicit(g).canonical()
        for fn in SYMBOLIC:
            assert fn(SymbolicEngine(g)).canonical() == want


# diameters


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_cycle_diameter(n):
    g = cycle(n)
    assert scc_diameter(g, frozenset(range(n))) == n - 1
    assert eccentricity(g, frozenset(range(n)), 0) == n - 1


def test_diameter_cap():
    part = scc_diameters(scc_explicit(cycle(30)), cycle(30), cap=10)
    assert part.diameters == [None] and part.d_star is None


def test_result_hash_is_order_independent():
    g = gen_layered_scc_graph(GenParams(n=60, layers=6, seed=1))[0]
    assert scc_find(SymbolicEngine(g)).result_hash() == scc_explicit(g).result_hash()

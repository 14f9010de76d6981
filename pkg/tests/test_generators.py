import pytest
from hypothesis import given
from hypothesis import strategies as st

from asbuchi import SymbolicEngine, m1, validate
from asbuchi.generators import (
    GenError,
    GenParams,
    gen_digraph,
    gen_layered_mdp,
    gen_layered_scc_graph,
    gen_random_mdp,
    line_trap_mdp,
    perturb_mdp,
)
from asbuchi.model import serialize_mdp
from asbuchi.scc import improved_scc_find, scc_explicit, scc_find


def test_same_seed_same_bytes():
    p = GenParams(n=50, m=150, seed=7)
    assert serialize_mdp(gen_random_mdp(p)) == serialize_mdp(gen_random_mdp(p))
    q = GenParams(n=50, m=150, seed=8)
    assert serialize_mdp(gen_random_mdp(p)) != serialize_mdp(gen_random_mdp(q))


def test_layered_mdp_deterministic():
    p = GenParams(n=200, m=800, layers=20, seed=3)
    assert serialize_mdp(gen_layered_mdp(p)) == serialize_mdp(gen_layered_mdp(p))


@given(st.integers(1, 40), st.integers(0, 2**64 - 1), st.floats(0, 1), st.floats(0, 1))
def test_random_mdps_are_valid(n, seed, p1, tf):
    g = gen_random_mdp(GenParams(n=n, m=min(2 * n, n * n), seed=seed, player1_fraction=p1, target_fraction=tf))
    validate(g)
    assert len(g.target) == round(tf * n)


def test_single_state_gets_self_loop():
    g = gen_random_mdp(GenParams(n=1, m=0, seed=0))
    assert g.edges() == [(0, 0)]


def test_edge_count_without_sinks():
    g = gen_random_mdp(GenParams(n=30, m=300, seed=1))
    assert g.m >= 300


@pytest.mark.parametrize("bad", [
    GenParams(n=0),
    GenParams(n=3, m=10),
    GenParams(n=3, m=-1),
    GenParams(n=5, player1_fraction=1.5),
    GenParams(n=5, target_fraction=-0.1),
])
def test_infeasible_params_raise(bad):
    with pytest.raises(GenError):
        gen_random_mdp(bad)


def test_infeasible_layers_raise():
    with pytest.raises(GenError):
        gen_layered_scc_graph(GenParams(n=4, layers=5))
    with pytest.raises(GenError):
        line_trap_mdp(3, 1)


def test_perturb_zero_is_identity():
    g = gen_random_mdp(GenParams(n=40, m=120, seed=2))
    assert serialize_mdp(perturb_mdp(g, 0.0, 9)) == serialize_mdp(g)


def test_perturb_bad_epsilon():
    with pytest.raises(GenError):
        perturb_mdp(m1(), 1.5, 0)


@pytest.mark.parametrize("eps", [0.05, 0.5, 1.0])
def test_perturb_keeps_owners_targets_and_edge_count(eps):
    g = gen_random_mdp(GenParams(n=60, m=240, seed=4))
    h = perturb_mdp(g, eps, 11)
    validate(h)
    assert h.m == g.m and h.player1_states == g.player1_states and h.target == g.target
    assert [len(s) for s in h.succ] == [len(s) for s in g.succ]


def test_perturb_m1():
    h = perturb_mdp(m1(), 1.0, 5)
    validate(h)
    assert h.m == m1().m


@given(st.integers(1, 80), st.integers(1, 80), st.integers(0, 1000), st.sampled_from([0.0, 0.5, 2.0]))
def test_layered_truth_is_the_partition(n, layers, seed, inter):
    layers = min(layers, n)
    g, truth = gen_layered_scc_graph(GenParams(n=n, layers=layers, seed=seed, inter_density=inter, intra_degree=0.5))
    want = tuple(tuple(c) for c in truth)
    assert len(truth) == layers
    assert scc_explicit(g).canonical() == want
    assert scc_find(SymbolicEngine(g)).canonical() == want
    assert improved_scc_find(SymbolicEngine(g)).canonical() == want


def test_layered_mdp_edge_budget():
    g = gen_layered_mdp(GenParams(n=500, m=2000, layers=50, seed=0))
    validate(g)
    assert 0.8 * 2000 <= g.m <= 2000


def test_digraph_edges_distinct():
    d = gen_digraph(GenParams(n=20, m=100, seed=0))
    assert d.m == 100 == len(set(d.edges()))


def test_line_trap_shape():
    g = line_trap_mdp(10, 2)
    assert list(g.player1_states) == [0, 1] and g.target == frozenset({8})
    assert g.succ[0] == g.succ[1] and set(g.succ[0]) == {2, 9}
    assert g.succ[9] == (9,)

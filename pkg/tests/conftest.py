import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from asbuchi import MdpGraph, read_mdp

settings.register_profile("default", max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_mdp():
    return lambda name: read_mdp(DATA / name)


@st.composite
def mdps(draw, min_n=1, max_n=9, max_player1=None):
    """Small valid MDPs: every state has at least one successor."""
    n = draw(st.integers(min_n, max_n))
    edges = []
    for u in range(n):
        succ = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=min(n, 4)))
        edges.extend((u, v) for v in succ)
    owners = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    if max_player1 is not None:
        seen = 0
        for i, o in enumerate(owners):
            if o:
                seen += 1
                if seen > max_player1:
                    owners[i] = False
    target = draw(st.sets(st.integers(0, n - 1), max_size=n))
    return MdpGraph.build(n, edges, [s for s in range(n) if owners[s]], target)


@st.composite
def digraphs(draw, max_n=12):
    from asbuchi import Digraph

    n = draw(st.integers(1, max_n))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n))
    return Digraph.from_edges(n, edges)

import random

from qgres.ensemble import LENGTHS, ensemble, random_graph
from qgres.graph import CouplingKind, require_valid, structural_flags


def summary(g):
    return (
        [(v.id, v.leads, v.coupling.kind) for v in g.vertices],
        [(e.id, e.start, e.end, e.length) for e in g.edges],
    )


def test_deterministic():
    assert [summary(g) for g in ensemble(3, 25)] == [summary(g) for g in ensemble(3, 25)]
    assert [summary(g) for g in ensemble(3, 25)] != [summary(g) for g in ensemble(4, 25)]


def test_graphs_are_valid_and_equilateral():
    for g in ensemble(1, 200, max_edges=4):
        require_valid(g)
        f = structural_flags(g)
        assert f.equilateral and f.common_length in LENGTHS
        assert 1 <= g.N <= 4
        assert not f.has_loops and not f.has_parallel_edges
        for v in g.vertices:
            assert g.internal_degree(v.id) > 0
            if v.coupling.kind is CouplingKind.DIRICHLET:
                assert g.internal_degree(v.id) == 1 and v.leads == 0


def test_loop_and_parallel_flags():
    flags = [structural_flags(g) for g in ensemble(2, 300, loops=True, parallel=True)]
    assert any(f.has_loops for f in flags)
    assert any(f.has_parallel_edges for f in flags)


def test_balanced_probability():
    rng = random.Random(0)
    all_bal = random_graph(rng, balanced=1.0, dirichlet=0.0)
    assert all(v.leads == all_bal.internal_degree(v.id) for v in all_bal.vertices)

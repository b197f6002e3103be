import random
from fractions import Fraction

import numpy as np
import pytest

import goldens
from qgres.bondgraph import assemble_sigma, bond_scattering, build_bond_graph, exact_scattering
from qgres.coupling import standard_unitary
from qgres.ensemble import random_graph
from qgres.graph import Coupling, MetricGraph, VertexSpec


def test_bond_labels_and_reversal(square):
    bg = build_bond_graph(square)
    assert bg.labels() == ["1", "2", "3", "4", "5", "1^", "2^", "3^", "4^", "5^"]
    assert bg.reversal(0) == 5 and bg.reversal(7) == 2
    b = bg.bonds[5]
    assert (b.source, b.target, b.reversed) == ("v2", "v1", True)
    assert bg.index_of("4^") == 8 and bg.index_of(3) == 3
    with pytest.raises(KeyError):
        bg.index_of("9")
    with pytest.raises(KeyError):
        bg.index_of(10)
    Q = bg.Q()
    assert (Q.dot(Q) == np.identity(10, dtype=object)).all()
    assert bg.L()[2, 2] == 1
    assert sorted(bg.ending_at("v2")) == [0, 4, 6]
    assert sorted(bg.starting_at("v2")) == [1, 5, 9]


def test_square_matrix_matches_reference(square):
    assert (exact_scattering(square) == goldens.SQUARE_S).all()


def test_k4_matrix_matches_reference(k4):
    assert (exact_scattering(k4) == goldens.K4_S).all()


def test_S_is_Q_times_Sigma(square, k4, star):
    for g in (square, k4, star):
        bg = build_bond_graph(g)
        assert (bg.Q().dot(assemble_sigma(g).exact) == bond_scattering(g).exact).all()


def test_star_entries(star):
    S = exact_scattering(star)
    # 1^ -> 1 bounces off the Dirichlet end, 1 -> 1^ reflects at the centre
    assert S[0, 3] == -1
    assert S[3, 0] == Fraction(-2, 3)
    assert S[4, 0] == Fraction(1, 3)


def test_support_follows_vertices():
    rng = random.Random(4)
    for _ in range(30):
        g = random_graph(rng, loops=True, parallel=True)
        bg = build_bond_graph(g)
        S = exact_scattering(g)
        for b2 in range(len(bg)):
            for b1 in range(len(bg)):
                if S[b2, b1] != 0:
                    assert bg.bonds[b1].target == bg.bonds[b2].source


def test_closed_graph_S_is_orthogonal():
    # without leads every vertex scatters unitarily, so S is orthogonal
    rng = random.Random(9)
    for _ in range(20):
        g = random_graph(rng, balanced=0.0, dirichlet=0.5)
        g = MetricGraph(tuple(VertexSpec(v.id, 0, v.coupling) for v in g.vertices), g.edges)
        S = exact_scattering(g)
        n = S.shape[0]
        assert (S.dot(S.T) == np.identity(n, dtype=object)).all()


def test_general_path_matches_exact():
    g = MetricGraph.build([("a", 1), ("b", 2), ("c", 0)], [("1", "a", "b", 1), ("2", "b", "c", 1), ("3", "c", "a", 1)])
    h = MetricGraph.build(
        [("a", 1, Coupling.general(standard_unitary(3).astype(complex))), ("b", 2), ("c", 0)],
        [("1", "a", "b", 1), ("2", "b", "c", 1), ("3", "c", "a", 1)],
    )
    Sg = bond_scattering(h)
    assert not Sg.is_exact
    assert (Sg.support == bond_scattering(g).support).all()
    for k in (0.4, 2 - 1j):
        assert np.allclose(Sg.at(k), exact_scattering(g).astype(complex), atol=1e-12)

import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

import goldens
from qgres.coupling import standard_unitary
from qgres.ensemble import random_graph
from qgres.errors import KDependentCoupling, NotEquilateral
from qgres.exact import Polynomial
from qgres.graph import Coupling, MetricGraph
from qgres.secular import (
    Verdict,
    classify_weyl,
    cross_check_weyl_standard,
    resonance_families,
    resonances_in_disc,
    scattering_matrix,
    secular_polynomial,
    secular_value,
    weyl_by_determinant,
)


def scaled(g, factor):
    edges = tuple(type(e)(e.id, e.start, e.end, e.length * factor) for e in g.edges)
    return MetricGraph(g.vertices, edges)


def test_reference_polynomials(star, square, k4, interval):
    assert secular_polynomial(star).poly == Polynomial(goldens.STAR_POLY)
    assert secular_polynomial(square).poly == Polynomial(goldens.SQUARE_POLY)
    assert secular_polynomial(k4).poly == Polynomial(goldens.K4_POLY)
    assert secular_polynomial(interval).poly == Polynomial(goldens.INTERVAL_POLY)


def test_classification(star, square, k4, interval):
    expect = {id(star): (2, 3), id(square): (Fraction(5, 2), 5), id(k4): (4, 6), id(interval): (1, 1)}
    for g in (star, square, k4, interval):
        wc = classify_weyl(g)
        W, vol = expect[id(g)]
        assert wc.W == W and wc.volume == vol
        assert wc.is_weyl == (W == vol)
    assert classify_weyl(interval).verdict is Verdict.WEYL


def test_effective_size_scales_with_length(square):
    wc = classify_weyl(scaled(square, Fraction(1, 2)))
    assert wc.W == Fraction(5, 4) and wc.ell == Fraction(1, 2)
    fams = resonance_families(scaled(square, Fraction(1, 2)))
    third = next(f for f in fams if f.exact_c == Fraction(-1, 3))
    assert cmath.isclose(third.k(0), complex(-math.pi, -math.log(3)) / 0.5, abs_tol=1e-12)


def test_not_equilateral():
    g = MetricGraph.build([("a", 1), ("b", 1)], [("1", "a", "b", 1), ("2", "a", "b", 2)])
    with pytest.raises(NotEquilateral):
        secular_polynomial(g)
    # the determinant test still classifies it
    assert weyl_by_determinant(g) is Verdict.WEYL
    h = MetricGraph.build([("a", 2), ("b", 1)], [("1", "a", "b", 1), ("2", "a", "b", 2)])
    assert weyl_by_determinant(h) is Verdict.NON_WEYL


def test_square_families(square):
    fams = resonance_families(square)
    got = sorted((f.exact_c, f.multiplicity) for f in fams)
    assert got == [(Fraction(-1), 1), (Fraction(-2, 3), 1), (Fraction(-1, 3), 1), (Fraction(1), 2)]


def test_disc_count(k4):
    fams = resonance_families(k4)
    disc = resonances_in_disc(fams, 10.0)
    # c = 1 (x3): k = 2n pi with |k| <= 10 -> n in -1..1
    # c = -1 (x2): (2n+1) pi -> n in -2..1
    # c = -1/3 (x3): (2n+1) pi - i ln 3 -> |Re| <= sqrt(100 - ln^2 3)
    assert disc.count == 3 * 3 + 2 * 4 + 3 * 4
    assert all(abs(k) <= 10 for k, _ in disc.points)
    with pytest.raises(ValueError):
        resonances_in_disc(fams, 0)


def test_secular_value_matches_polynomial(square, star):
    for g in (square, star):
        P = secular_polynomial(g).poly
        for k in (0.3, 1.7 - 0.4j, 5 + 0.2j):
            assert cmath.isclose(secular_value(g, k), complex(P(cmath.exp(1j * k))), abs_tol=1e-10)


def test_secular_value_vanishes_on_lattice(star, interval):
    # star resonances sit at k = n pi / ell
    for k in (math.pi, 2 * math.pi):
        assert abs(secular_value(star, k)) < 1e-12
    assert abs(secular_value(star, math.pi / 2)) > 1
    assert abs(secular_value(interval, 3 * math.pi)) < 1e-12


def test_secular_value_non_equilateral():
    g = MetricGraph.build([("a", 0, Coupling.dirichlet()), ("b", 0, Coupling.dirichlet())], [("1", "a", "b", "2")])
    assert abs(secular_value(g, math.pi / 2)) < 1e-12
    assert abs(secular_value(g, math.pi / 3)) > 0.1


def test_k_dependent_coupling_rejected():
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    U, _ = np.linalg.qr(Z)
    g = MetricGraph.build([("a", 1, Coupling.general(U)), ("b", 1)], [("1", "a", "b", 1), ("2", "a", "b", 1)])
    with pytest.raises(KDependentCoupling):
        secular_polynomial(g)


def test_constant_general_coupling_uses_complex_path(star):
    centre = Coupling.general(standard_unitary(6).astype(complex))
    vertices = tuple(v if v.id != "v4" else type(v)("v4", 3, centre) for v in star.vertices)
    g = MetricGraph(vertices, star.edges)
    sp = secular_polynomial(g)
    assert not sp.is_exact
    assert np.allclose(sp.poly.as_complex(), [1, 0, -2, 0, 1], atol=1e-10)
    wc = classify_weyl(g)
    assert wc.W == 2
    fams = resonance_families(g)
    assert sorted((round(f.c.real, 9), f.multiplicity) for f in fams) == [(-1.0, 2), (1.0, 2)]


def test_balanced_cross_check_on_ensemble():
    rng = random.Random(21)
    for _ in range(60):
        g = random_graph(rng, loops=True, parallel=True)
        assert cross_check_weyl_standard(g)
        assert (weyl_by_determinant(g) is Verdict.NON_WEYL) == (not classify_weyl(g).is_weyl)


def test_families_respect_modulus_and_trace():
    rng = random.Random(5)
    for _ in range(40):
        g = random_graph(rng)
        S = scattering_matrix(g)
        fams = resonance_families(g)
        assert all(f.r <= 1 + 1e-9 for f in fams)
        assert sum(S.diagonal()) == 0
        assert sum(f.multiplicity for f in fams) == secular_polynomial(g).degree

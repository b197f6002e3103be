from fractions import Fraction

import numpy as np
import pytest

from qgres.coupling import (
    K_PROBES,
    CouplingBlocks,
    coupling_from_sigma,
    detect_k_independence,
    effective_coupling,
    effective_vertex_scattering,
    sigma_from_coupling,
    solve,
    standard_sigma,
    standard_unitary,
    vertex_scattering,
)
from qgres.errors import SingularPivot
from qgres.exact import det_rank
from qgres.graph import Coupling, MetricGraph


def random_unitary(n, seed):
    rng = np.random.default_rng(seed)
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / abs(np.diag(R)))


def test_standard_sigma_entries():
    S = standard_sigma(3, 3)
    assert S[0, 0] == Fraction(-2, 3) and S[0, 1] == Fraction(1, 3)
    S2 = standard_sigma(2, 0)
    assert S2[0, 0] == 0 and S2[0, 1] == 1


def test_standard_unitary_is_orthogonal():
    for d in range(1, 6):
        U = standard_unitary(d)
        assert (U.dot(U) == np.identity(d, dtype=object)).all()


@pytest.mark.parametrize("n, m", [(1, 0), (2, 1), (3, 3), (2, 5), (4, 4)])
def test_schur_complement_reproduces_standard(n, m):
    blocks = CouplingBlocks.standard(n, m)
    expected = standard_sigma(n, m).astype(complex)
    for k in K_PROBES:
        assert np.allclose(effective_vertex_scattering(blocks, k), expected, atol=1e-12)


def test_balanced_vertex_sigma_is_singular():
    for d in range(1, 5):
        assert det_rank(standard_sigma(d, d)).det == 0
        assert det_rank(standard_sigma(d, d)).rank == d - 1
        assert det_rank(standard_sigma(d, d + 1)).det != 0


def test_sigma_coupling_inverse():
    U = random_unitary(3, 1)
    for k in (0.7, 1.9 + 0.4j):
        s = sigma_from_coupling(U, k)
        assert np.allclose(coupling_from_sigma(s, k), U, atol=1e-10)


def test_no_leads_sigma_unitary_for_real_k():
    U = random_unitary(4, 2)
    blocks = CouplingBlocks.from_unitary(U, 4)
    for k in (0.3, 2.5, 7.0):
        s = effective_vertex_scattering(blocks, k)
        assert np.allclose(s @ s.conj().T, np.eye(4), atol=1e-10)


def test_leads_make_sigma_subunitary():
    blocks = CouplingBlocks.from_unitary(random_unitary(5, 3), 2)
    s = effective_vertex_scattering(blocks, 1.1)
    assert np.linalg.norm(s, 2) <= 1 + 1e-10


def test_effective_coupling_without_leads_is_u1():
    U = random_unitary(3, 4)
    assert np.allclose(effective_coupling(CouplingBlocks.from_unitary(U, 3), 0.4), U)


def test_k_independence_detection():
    # Hermitian unitaries give constant scattering, generic unitaries do not
    swap = CouplingBlocks.from_unitary(np.array([[0, 1], [1, 0]]), 2)
    assert detect_k_independence(lambda k: effective_vertex_scattering(swap, k))
    generic = CouplingBlocks.from_unitary(random_unitary(2, 5), 2)
    assert not detect_k_independence(lambda k: effective_vertex_scattering(generic, k))


def test_vertex_scattering_kinds():
    g = MetricGraph.build(
        [("a", 0, Coupling.dirichlet()), ("b", 1), ("c", 0, Coupling.general(random_unitary(1, 6))), ("d", 1, Coupling.dirichlet())],
        [("1", "a", "b", 1), ("2", "b", "c", 1)],
    )
    assert vertex_scattering(g, "a").exact[0, 0] == -1
    assert vertex_scattering(g, "b").exact[0, 1] == Fraction(2, 3)
    assert not vertex_scattering(g, "c").is_exact
    # a Dirichlet vertex carrying only a lead has nothing to scatter
    assert vertex_scattering(g, "d").n == 0
    assert detect_k_independence(vertex_scattering(g, "b"))


def test_solve_matches_numpy_and_detects_singularity():
    rng = np.random.default_rng(7)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    B = rng.normal(size=(4, 2))
    assert np.allclose(solve(A, B), np.linalg.solve(A, B))
    assert np.allclose(solve(A, B[:, 0]), np.linalg.solve(A, B[:, 0]))
    with pytest.raises(SingularPivot):
        solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.eye(2))


def test_forbidden_k_raises():
    # U4 = I turns the lead block into -2k I, singular at k = 0
    blocks = CouplingBlocks.from_unitary(np.eye(2), 1)
    with pytest.raises(SingularPivot):
        effective_coupling(blocks, 0)

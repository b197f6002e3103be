"""Effective coupling and effective vertex-scattering matrices.

Eliminating the leads at a vertex leaves a k-dependent coupling on its
``n`` internal edge-ends (Schur complement of the vertex unitary).  Its
Cayley-type transform is the effective vertex-scattering matrix that maps
incoming to outgoing internal amplitudes.  Standard and Dirichlet vertices
give k-independent rational matrices and are handled exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from .errors import SingularPivot
from .graph import CouplingKind, MetricGraph

PIVOT_RTOL = 1e-12
K_PROBES = (0.5, 1.3, 2.0 + 1.0j, -0.7 + 0.2j, 3.1 - 2.2j)
K_INDEPENDENCE_TOL = 1e-10


def solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve ``A X = B`` by Gaussian elimination with partial pivoting.

    Raises SingularPivot when a pivot falls below ``PIVOT_RTOL`` times the
    largest row norm of ``A``.
    """
    A = np.array(A, dtype=complex)
    X = np.array(B, dtype=complex)
    vector = X.ndim == 1
    if vector:
        X = X[:, None]
    n = A.shape[0]
    if n == 0:
        return X[:, 0] if vector else X
    scale = max(np.linalg.norm(A, axis=1).max(), np.finfo(float).tiny)
    for col in range(n):
        p = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[p, col]) < PIVOT_RTOL * scale:
            raise SingularPivot(f"pivot {abs(A[p, col]):.3e} in column {col} below tolerance")
        if p != col:
            A[[col, p]] = A[[p, col]]
            X[[col, p]] = X[[p, col]]
        f = A[col + 1:, col] / A[col, col]
        A[col + 1:, col:] -= np.outer(f, A[col, col:])
        X[col + 1:] -= np.outer(f, X[col])
    for col in range(n - 1, -1, -1):
        X[col] = (X[col] - A[col, col + 1:] @ X[col + 1:]) / A[col, col]
    return X[:, 0] if vector else X


def _right_divide(B: np.ndarray, A: np.ndarray) -> np.ndarray:
    """``B A^{-1}``."""
    return solve(A.T, B.T).T


# --------------------------------------------------------------------------

def standard_unitary(d: int) -> np.ndarray:
    """Vertex unitary of the standard coupling, ``(2/d) J_d - I_d``, as exact Fractions."""
    if d < 1:
        raise ValueError("degree must be positive")
    U = np.full((d, d), Fraction(2, d), dtype=object)
    for i in range(d):
        U[i, i] -= 1
    return U


def standard_sigma(n: int, m: int) -> np.ndarray:
    """Exact effective vertex-scattering matrix ``(2/(n+m)) J_n - I_n`` of a standard vertex."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    S = np.full((n, n), Fraction(2, n + m), dtype=object)
    for i in range(n):
        S[i, i] -= 1
    return S


def dirichlet_sigma() -> np.ndarray:
    return np.array([[Fraction(-1)]], dtype=object)


@dataclass(frozen=True)
class CouplingBlocks:
    """Blocks of a vertex unitary split into internal (n) and lead (m) parts."""

    U1: np.ndarray
    U2: np.ndarray
    U3: np.ndarray
    U4: np.ndarray

    @classmethod
    def from_unitary(cls, U, n: int) -> CouplingBlocks:
        U = np.asarray(U, dtype=complex)
        return cls(U[:n, :n], U[:n, n:], U[n:, :n], U[n:, n:])

    @classmethod
    def standard(cls, n: int, m: int) -> CouplingBlocks:
        return cls.from_unitary(standard_unitary(n + m).astype(complex), n)

    @property
    def n(self) -> int:
        return self.U1.shape[0]

    @property
    def m(self) -> int:
        return self.U4.shape[0]

    def assembled(self) -> np.ndarray:
        return np.block([[self.U1, self.U2], [self.U3, self.U4]])


def effective_coupling(blocks: CouplingBlocks, k: complex) -> np.ndarray:
    """``U1 - (1-k) U2 [(1-k) U4 - (1+k) I]^{-1} U3``."""
    if blocks.m == 0:
        return blocks.U1.astype(complex).copy()
    inner = (1 - k) * blocks.U4 - (1 + k) * np.eye(blocks.m)
    return blocks.U1 - (1 - k) * blocks.U2 @ solve(inner, blocks.U3)


def sigma_from_coupling(Ut: np.ndarray, k: complex) -> np.ndarray:
    n = Ut.shape[0]
    eye = np.eye(n)
    return -solve((1 - k) * Ut - (1 + k) * eye, (1 + k) * Ut - (1 - k) * eye)


def coupling_from_sigma(sigma: np.ndarray, k: complex) -> np.ndarray:
    """Inverse relation: ``[(1+k) s + (1-k) I][(1-k) s + (1+k) I]^{-1}``."""
    n = sigma.shape[0]
    eye = np.eye(n)
    return _right_divide((1 + k) * sigma + (1 - k) * eye, (1 - k) * sigma + (1 + k) * eye)


def effective_vertex_scattering(blocks: CouplingBlocks, k: complex) -> np.ndarray:
    return sigma_from_coupling(effective_coupling(blocks, k), k)


# --------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexScattering:
    """Effective vertex-scattering data of one vertex.

    ``exact`` holds a k-independent Fraction matrix when available;
    otherwise ``blocks`` is sampled at each requested k.
    """

    vertex: str
    n: int
    exact: np.ndarray | None = None
    blocks: CouplingBlocks | None = None

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def at(self, k: complex) -> np.ndarray:
        if self.exact is not None:
            return self.exact.astype(complex)
        return effective_vertex_scattering(self.blocks, k)


def vertex_scattering(g: MetricGraph, vid: str) -> VertexScattering:
    v = g.vertex(vid)
    n = g.internal_degree(vid)
    kind = v.coupling.kind
    if n == 0:
        return VertexScattering(vid, 0, exact=np.empty((0, 0), dtype=object))
    if kind is CouplingKind.STANDARD:
        return VertexScattering(vid, n, exact=standard_sigma(n, v.leads))
    if kind is CouplingKind.DIRICHLET:
        if n != 1 or v.leads != 0:
            raise ValueError(f"dirichlet vertex {vid!r} must have exactly one internal edge-end")
        return VertexScattering(vid, n, exact=dirichlet_sigma())
    return VertexScattering(vid, n, blocks=CouplingBlocks.from_unitary(v.coupling.matrix(), n))


Sampler = Callable[[complex], np.ndarray]


def detect_k_independence(
    scattering: Union[VertexScattering, Sampler],
    probes=K_PROBES,
    tol: float = K_INDEPENDENCE_TOL,
) -> bool:
    """True iff the sampled matrix is the same at every probe k (entrywise, within ``tol``).

    Heuristic for general couplings; exact vertices return True without sampling.
    """
    if isinstance(scattering, VertexScattering):
        if scattering.is_exact:
            return True
        sampler = scattering.at
    else:
        sampler = scattering
    samples = [np.asarray(sampler(k), dtype=complex) for k in probes]
    ref = samples[0]
    if ref.size == 0:
        return True
    return all(np.max(np.abs(s - ref)) < tol for s in samples[1:])

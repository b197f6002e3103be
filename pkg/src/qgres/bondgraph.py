"""The doubled directed graph of bonds and the bond-scattering matrix ``S = Q Sigma``.

Bond ordering: index ``j`` (``0 <= j < N``) is edge ``j`` traversed from its
``start`` to its ``end`` vertex; index ``N + j`` is the reverse traversal.
Leads are discarded.  ``S[b2, b1]`` is the amplitude for continuing from
bond ``b1`` into bond ``b2``; it is nonzero only when ``b1`` ends where
``b2`` starts, and equals the entry of the effective vertex-scattering
matrix of that vertex between the two edge-ends.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .coupling import VertexScattering, vertex_scattering
from .graph import EdgeEnd, MetricGraph

SUPPORT_PROBE = 0.5 + 0.3j
SUPPORT_TOL = 1e-14


@dataclass(frozen=True)
class Bond:
    index: int
    edge: int
    edge_id: str
    source: str
    target: str
    reversed: bool

    @property
    def label(self) -> str:
        return self.edge_id + ("^" if self.reversed else "")


@dataclass(frozen=True)
class BondGraph:
    bonds: tuple[Bond, ...]
    lengths: tuple[Fraction, ...]

    @property
    def N(self) -> int:
        return len(self.bonds) // 2

    def __len__(self) -> int:
        return len(self.bonds)

    def reversal(self, b: int) -> int:
        return (b + self.N) % (2 * self.N)

    def Q(self) -> np.ndarray:
        n = len(self.bonds)
        Q = np.full((n, n), Fraction(0), dtype=object)
        for b in range(n):
            Q[b, self.reversal(b)] = Fraction(1)
        return Q

    def L(self) -> np.ndarray:
        n = len(self.bonds)
        L = np.full((n, n), Fraction(0), dtype=object)
        for b, length in enumerate(self.lengths):
            L[b, b] = length
        return L

    def in_bond(self, end: EdgeEnd) -> int:
        """Bond arriving at the vertex through this edge-end."""
        return end.edge + self.N if end.at_start else end.edge

    def out_bond(self, end: EdgeEnd) -> int:
        return end.edge if end.at_start else end.edge + self.N

    def ending_at(self, vid: str) -> list[int]:
        return [b.index for b in self.bonds if b.target == vid]

    def starting_at(self, vid: str) -> list[int]:
        return [b.index for b in self.bonds if b.source == vid]

    def index_of(self, label) -> int:
        """Bond index from an int index or a label such as ``"3"`` / ``"3^"``."""
        if isinstance(label, int) and not isinstance(label, bool):
            if not 0 <= label < len(self.bonds):
                raise KeyError(f"bond index {label} out of range")
            return label
        for b in self.bonds:
            if b.label == str(label):
                return b.index
        raise KeyError(f"unknown bond {label!r}")

    def labels(self) -> list[str]:
        return [b.label for b in self.bonds]


def build_bond_graph(g: MetricGraph) -> BondGraph:
    fwd = [Bond(j, j, e.id, e.start, e.end, False) for j, e in enumerate(g.edges)]
    bwd = [Bond(g.N + j, j, e.id, e.end, e.start, True) for j, e in enumerate(g.edges)]
    lengths = tuple(e.length for e in g.edges) * 2
    return BondGraph(tuple(fwd + bwd), lengths)


@dataclass(frozen=True)
class BondMatrix:
    """A 2N x 2N matrix on bonds, either exact or sampled as a function of k."""

    support: np.ndarray
    exact: np.ndarray | None = None
    sampler: Callable[[complex], np.ndarray] | None = None

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def at(self, k: complex = 0) -> np.ndarray:
        if self.exact is not None:
            return self.exact.astype(complex)
        return self.sampler(k)


def _vertex_data(g: MetricGraph) -> list[tuple[list[EdgeEnd], VertexScattering]]:
    return [(g.edge_ends(v.id), vertex_scattering(g, v.id)) for v in g.vertices]


def _fill(bg: BondGraph, data, values: Callable[[VertexScattering], np.ndarray], rows: str, out: np.ndarray):
    for ends, vs in data:
        if not ends:
            continue
        sigma = values(vs)
        for a, end_a in enumerate(ends):
            row = bg.in_bond(end_a) if rows == "in" else bg.out_bond(end_a)
            for c, end_c in enumerate(ends):
                out[row, bg.in_bond(end_c)] = sigma[a, c]
    return out


def _assemble(g: MetricGraph, bg: BondGraph, rows: str) -> BondMatrix:
    data = _vertex_data(g)
    n = len(bg)
    if all(vs.is_exact for _, vs in data):
        M = _fill(bg, data, lambda vs: vs.exact, rows, np.full((n, n), Fraction(0), dtype=object))
        return BondMatrix(support=(M != 0).astype(bool), exact=M)

    def sampler(k: complex) -> np.ndarray:
        return _fill(bg, data, lambda vs: vs.at(k), rows, np.zeros((n, n), dtype=complex))

    probe = sampler(SUPPORT_PROBE)
    scale = max(np.abs(probe).max(initial=0.0), 1.0)
    return BondMatrix(support=np.abs(probe) > SUPPORT_TOL * scale, sampler=sampler)


def assemble_sigma(g: MetricGraph, bg: BondGraph | None = None) -> BondMatrix:
    """Sigma in the bond basis: ``Sigma[in(a), in(c)] = sigma_v[a, c]`` for edge-ends a, c at v."""
    return _assemble(g, bg if bg is not None else build_bond_graph(g), rows="in")


def bond_scattering(g: MetricGraph, bg: BondGraph | None = None) -> BondMatrix:
    """``S = Q Sigma``: rows are outgoing bonds, columns incoming bonds."""
    return _assemble(g, bg if bg is not None else build_bond_graph(g), rows="out")


def exact_scattering(g: MetricGraph) -> np.ndarray | None:
    """Exact ``S`` for graphs whose couplings are all standard/Dirichlet, else None."""
    return bond_scattering(g).exact


"""Periodic orbits and irreducible pseudo orbits on the bond graph.

A periodic orbit is a simple cycle in *bond space*: nodes are directed
bonds and ``b1 -> b2`` is allowed when ``S[b2, b1] != 0``.  Revisiting a
vertex is fine; reusing a bond is not.  An irreducible pseudo orbit is a set
of pairwise bond-disjoint periodic orbits.  Expanding the determinant over
permutations gives exactly one term per such set::

    det(I - z S) = sum over pseudo orbits of (-1)**m * A * z**(number of bonds)

where ``m`` is the number of orbits and ``A`` the product of their
amplitudes.  For the even-sized bond matrix this is also ``det(z S - I)``,
so the enumeration is an independent check on the characteristic
polynomial.  The same holds for any matrix with a
zero column (ghost-edge reductions): the deleted bond simply never occurs.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .bondgraph import build_bond_graph
from .errors import CapExceeded, NotEquilateral
from .exact import Polynomial
from .graph import MetricGraph, structural_flags
from .secular import SecularPolynomial, scattering_matrix

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class PeriodicOrbit:
    bonds: tuple[int, ...]  # canonical rotation: starts at the smallest bond
    amplitude: object  # Fraction on the exact path

    @property
    def bond_count(self) -> int:
        return len(self.bonds)

    @property
    def mask(self) -> int:
        m = 0
        for b in self.bonds:
            m |= 1 << b
        return m


@dataclass(frozen=True)
class IrreduciblePseudoOrbit:
    orbits: tuple[PeriodicOrbit, ...]

    @property
    def m(self) -> int:
        return len(self.orbits)

    @property
    def total_bonds(self) -> int:
        return sum(o.bond_count for o in self.orbits)

    @property
    def amplitude(self):
        a = Fraction(1)
        for o in self.orbits:
            a = a * o.amplitude
        return a

    @property
    def contribution(self):
        """Signed term ``(-1)**m * A`` multiplying ``z**total_bonds``."""
        return -self.amplitude if self.m % 2 else self.amplitude


def successors(support: np.ndarray) -> list[list[int]]:
    """Bond digraph adjacency: ``b1 -> b2`` iff ``support[b2, b1]``."""
    support = np.asarray(support, dtype=bool)
    n = support.shape[0]
    return [[int(b2) for b2 in np.flatnonzero(support[:, b1])] for b1 in range(n)]


def _component_of(s: int, succ: list[list[int]], pred: list[list[int]]) -> set[int]:
    """Strong component of ``s`` within the subgraph on nodes ``>= s``."""

    def reach(adj):
        seen = {s}
        todo = [s]
        while todo:
            v = todo.pop()
            for w in adj[v]:
                if w >= s and w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    return reach(succ) & reach(pred)


def simple_cycles(succ: list[list[int]]) -> Iterator[list[int]]:
    """Johnson's algorithm.  Every cycle is yielded once, starting at its smallest node."""
    n = len(succ)
    pred: list[list[int]] = [[] for _ in range(n)]
    for v, ws in enumerate(succ):
        for w in ws:
            pred[w].append(v)

    for s in range(n):
        comp = _component_of(s, succ, pred)
        if len(comp) == 1 and s not in succ[s]:
            continue
        adj = {v: [w for w in succ[v] if w in comp] for v in comp}
        blocked = {s}
        B: dict[int, set[int]] = defaultdict(set)
        path = [s]
        stack = [iter(adj[s])]
        closed = [False]

        def unblock(u: int) -> None:
            todo = [u]
            while todo:
                x = todo.pop()
                if x in blocked:
                    blocked.discard(x)
                    todo.extend(B[x])
                    B[x].clear()

        while stack:
            for w in stack[-1]:
                if w == s:
                    yield list(path)
                    closed[-1] = True
                elif w not in blocked:
                    path.append(w)
                    closed.append(False)
                    stack.append(iter(adj[w]))
                    blocked.add(w)
                    break
            else:
                stack.pop()
                v = path.pop()
                if closed.pop():
                    if closed:
                        closed[-1] = True
                    unblock(v)
                else:
                    for w in adj[v]:
                        B[w].add(v)


def orbit_amplitude(S: np.ndarray, bonds: Sequence[int]):
    """``S[b2,b1] S[b3,b2] ... S[b1,bn]``."""
    a = Fraction(1)
    for i, b in enumerate(bonds):
        a = a * S[bonds[(i + 1) % len(bonds)], b]
    return a


def enumerate_cycles(S: np.ndarray, cap: int = DEFAULT_CAP) -> list[PeriodicOrbit]:
    """All periodic orbits of the bond matrix, sorted by (length, bonds)."""
    S = np.asarray(S)
    out = []
    for cyc in simple_cycles(successors(S != 0)):
        out.append(PeriodicOrbit(tuple(cyc), orbit_amplitude(S, cyc)))
        if len(out) > cap:
            raise CapExceeded("periodic orbit count", cap)
    out.sort(key=lambda o: (o.bond_count, o.bonds))
    return out


def iter_pseudo_orbits(
    cycles: Sequence[PeriodicOrbit],
    n_bonds: int,
    max_bonds: int | None = None,
    cap: int = DEFAULT_CAP,
) -> Iterator[IrreduciblePseudoOrbit]:
    """Every bond-disjoint collection of cycles, including the empty one.

    Bonds are decided in index order: bond ``p`` is either left unused or
    covered by a cycle whose smallest bond is ``p``.  That gives each
    collection exactly once.
    """
    by_min: list[list[tuple[int, PeriodicOrbit]]] = [[] for _ in range(n_bonds)]
    for c in cycles:
        by_min[c.bonds[0]].append((c.mask, c))
    limit = n_bonds if max_bonds is None else max_bonds
    count = 0

    def rec(p: int, mask: int, used: int, chosen: tuple) -> Iterator[IrreduciblePseudoOrbit]:
        nonlocal count
        if p == n_bonds:
            count += 1
            if count > cap:
                raise CapExceeded("pseudo orbit count", cap)
            yield IrreduciblePseudoOrbit(chosen)
            return
        yield from rec(p + 1, mask, used, chosen)
        if not mask >> p & 1:
            for cmask, cyc in by_min[p]:
                if not mask & cmask and used + cyc.bond_count <= limit:
                    yield from rec(p + 1, mask | cmask, used + cyc.bond_count, chosen + (cyc,))

    yield from rec(0, 0, 0, ())


def expansion_from_matrix(S: np.ndarray, cap: int = DEFAULT_CAP) -> Polynomial:
    """``det(z S - I)`` rebuilt as a sum over irreducible pseudo orbits.

    The sum itself is ``det(I - z S)``; the two differ by ``(-1)**n``, which
    is 1 for bond matrices.
    """
    S = np.asarray(S)
    n = S.shape[0]
    coeffs: list = [Fraction(0)] * (n + 1)
    for po in iter_pseudo_orbits(enumerate_cycles(S, cap), n, cap=cap):
        coeffs[po.total_bonds] += po.contribution
    if n % 2:
        coeffs = [-c for c in coeffs]
    return Polynomial(tuple(coeffs))


def expansion_polynomial(g: MetricGraph, cap: int = DEFAULT_CAP) -> SecularPolynomial:
    flags = structural_flags(g)
    if not flags.equilateral:
        raise NotEquilateral("pseudo orbit expansion in z needs a common edge length")
    S = scattering_matrix(g)
    return SecularPolynomial(expansion_from_matrix(S, cap), flags.common_length, 2 * g.N)


@dataclass(frozen=True)
class OrbitReport:
    labels: tuple[str, ...]
    groups: dict[int, list[IrreduciblePseudoOrbit]]

    def coefficient(self, t: int):
        return sum((po.contribution for po in self.groups.get(t, [])), Fraction(0))

    def orbit_labels(self, po: IrreduciblePseudoOrbit) -> list[list[str]]:
        return [[self.labels[b] for b in o.bonds] for o in po.orbits]

    def records(self) -> Iterator[dict]:
        from .exact import format_number

        for t in sorted(self.groups):
            for po in self.groups[t]:
                yield {
                    "total_bonds": t,
                    "m": po.m,
                    "bonds": self.orbit_labels(po),
                    "amplitude": format_number(po.amplitude),
                }


def orbit_report(
    g: MetricGraph,
    max_bonds: int,
    cap: int = DEFAULT_CAP,
    matrix: np.ndarray | None = None,
) -> OrbitReport:
    """Irreducible pseudo orbits with at most ``max_bonds`` bonds, grouped by bond count.

    ``matrix`` replaces the graph's bond-scattering matrix (e.g. a reduced one).
    """
    S = scattering_matrix(g) if matrix is None else np.asarray(matrix)
    labels = tuple(build_bond_graph(g).labels())
    cycles = [c for c in enumerate_cycles(S, cap) if c.bond_count <= max_bonds]
    groups: dict[int, list[IrreduciblePseudoOrbit]] = defaultdict(list)
    for po in iter_pseudo_orbits(cycles, S.shape[0], max_bonds=max_bonds, cap=cap):
        groups[po.total_bonds].append(po)
    for t in groups:
        groups[t].sort(key=lambda po: (po.m, [o.bonds for o in po.orbits]))
    return OrbitReport(labels, dict(groups))

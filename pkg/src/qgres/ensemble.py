"""Seeded random equilateral graphs for property checks."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator

from .graph import DIRICHLET, STANDARD, MetricGraph, VertexSpec, InternalEdge

LENGTHS = (Fraction(1), Fraction(1, 2), Fraction(3, 2), Fraction(2))


def random_graph(
    rng: random.Random,
    max_edges: int = 4,
    max_vertices: int = 5,
    loops: bool = False,
    parallel: bool = False,
    dirichlet: float = 0.3,
    balanced: float = 0.5,
) -> MetricGraph:
    """Equilateral graph with 1..max_edges edges, standard coupling and optional Dirichlet leaves.

    ``balanced`` is the chance that a standard vertex gets as many leads as
    internal edge-ends; otherwise the lead count is uniform in ``0..d+1``.
    """
    nv = rng.randint(2, max_vertices)
    names = [f"v{i}" for i in range(nv)]
    n_edges = rng.randint(1, max_edges)
    pairs: set[frozenset[str]] = set()
    raw = []
    attempts = 0
    while len(raw) < n_edges and attempts < 100:
        attempts += 1
        a, b = rng.choice(names), rng.choice(names)
        if a == b and not loops:
            continue
        key = frozenset((a, b))
        if key in pairs and not parallel:
            continue
        pairs.add(key)
        raw.append((a, b))
    ell = rng.choice(LENGTHS)
    edges = tuple(InternalEdge(str(j + 1), a, b, ell) for j, (a, b) in enumerate(raw))

    deg = {v: 0 for v in names}
    for a, b in raw:
        deg[a] += 1
        deg[b] += 1
    vertices = []
    for v in names:
        d = deg[v]
        if d == 0:
            continue
        if d == 1 and rng.random() < dirichlet:
            vertices.append(VertexSpec(v, 0, DIRICHLET))
            continue
        leads = d if rng.random() < balanced else rng.randint(0, d + 1)
        vertices.append(VertexSpec(v, leads, STANDARD))
    return MetricGraph(tuple(vertices), edges)


def ensemble(seed: int, count: int, **kwargs) -> Iterator[MetricGraph]:
    rng = random.Random(seed)
    for _ in range(count):
        yield random_graph(rng, **kwargs)

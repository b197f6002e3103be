"""Metric graphs with attached leads: data model, JSON I/O and structural queries.

A graph has vertices (each with a number of semi-infinite leads and a
coupling condition) and internal edges of positive length.  Each internal
edge is parametrized from its ``start`` vertex to its ``end`` vertex; the
orientation only fixes the bond numbering and has no physical meaning.

Lengths are stored as :class:`fractions.Fraction` parsed from decimal
strings, so equilaterality is an exact test.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import GraphFormatError, InvalidGraph

UNITARY_TOL = 1e-12


class CouplingKind(str, enum.Enum):
    STANDARD = "standard"
    DIRICHLET = "dirichlet"
    GENERAL = "general"


@dataclass(frozen=True)
class Coupling:
    """Vertex coupling: standard (Kirchhoff), Dirichlet, or a general unitary.

    For ``GENERAL`` the matrix acts on (internal edge-ends, then leads) in the
    order given by :meth:`MetricGraph.edge_ends`.
    """

    kind: CouplingKind
    unitary: tuple[tuple[complex, ...], ...] | None = None

    @classmethod
    def standard(cls) -> Coupling:
        return cls(CouplingKind.STANDARD)

    @classmethod
    def dirichlet(cls) -> Coupling:
        return cls(CouplingKind.DIRICHLET)

    @classmethod
    def general(cls, matrix: Any) -> Coupling:
        arr = np.asarray(matrix, dtype=complex)
        if arr.ndim != 2:
            raise ValueError("unitary coupling must be a 2-d matrix")
        return cls(CouplingKind.GENERAL, tuple(tuple(complex(x) for x in row) for row in arr))

    def matrix(self) -> np.ndarray:
        if self.unitary is None:
            raise ValueError(f"{self.kind.value} coupling carries no explicit matrix")
        return np.array(self.unitary, dtype=complex)

    @property
    def is_exact(self) -> bool:
        return self.kind is not CouplingKind.GENERAL


STANDARD = Coupling.standard()
DIRICHLET = Coupling.dirichlet()


@dataclass(frozen=True)
class VertexSpec:
    id: str
    leads: int = 0
    coupling: Coupling = STANDARD


@dataclass(frozen=True)
class InternalEdge:
    id: str
    start: str
    end: str
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.start == self.end


@dataclass(frozen=True)
class EdgeEnd:
    """One end of an internal edge as seen from a vertex."""

    edge: int  # index into MetricGraph.edges
    at_start: bool  # True for the x = 0 end of the edge


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def parse_length(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise GraphFormatError(f"bad length {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, float):
        # floats are accepted but read through their shortest repr
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise GraphFormatError(f"bad length {value!r}") from exc
    raise GraphFormatError(f"bad length {value!r}")


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple[VertexSpec, ...]
    edges: tuple[InternalEdge, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "_index", {v.id: i for i, v in enumerate(self.vertices)})

    @classmethod
    def build(
        cls,
        vertices: Iterable[VertexSpec | tuple],
        edges: Iterable[InternalEdge | tuple],
    ) -> MetricGraph:
        """Convenience constructor accepting plain tuples.

        Vertices as ``(id, leads[, coupling])``, edges as
        ``(id, start, end, length)``.
        """
        vs = [v if isinstance(v, VertexSpec) else VertexSpec(*v) for v in vertices]
        es = []
        for e in edges:
            if not isinstance(e, InternalEdge):
                eid, a, b, length = e
                e = InternalEdge(str(eid), a, b, parse_length(length))
            es.append(e)
        return cls(tuple(vs), tuple(es))

    @property
    def N(self) -> int:
        return len(self.edges)

    @property
    def M(self) -> int:
        return sum(v.leads for v in self.vertices)

    @property
    def volume(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    def vertex(self, vid: str) -> VertexSpec:
        return self.vertices[self._index[vid]]

    def has_vertex(self, vid: str) -> bool:
        return vid in self._index

    def edge_ends(self, vid: str) -> list[EdgeEnd]:
        """Internal edge-ends at ``vid`` in canonical order (edge order, start end first)."""
        ends = []
        for j, e in enumerate(self.edges):
            if e.start == vid:
                ends.append(EdgeEnd(j, True))
            if e.end == vid:
                ends.append(EdgeEnd(j, False))
        return ends

    def internal_degree(self, vid: str) -> int:
        return sum((e.start == vid) + (e.end == vid) for e in self.edges)

    def degree(self, vid: str) -> int:
        return self.internal_degree(vid) + self.vertex(vid).leads

    def neighbors(self, vid: str) -> set[str]:
        out = set()
        for e in self.edges:
            if e.start == vid and e.end != vid:
                out.add(e.end)
            elif e.end == vid and e.start != vid:
                out.add(e.start)
        return out

    def adjacent(self, a: str, b: str) -> bool:
        return any({e.start, e.end} == {a, b} for e in self.edges) if a != b else False

    def to_dict(self) -> dict:
        def coupling(c: Coupling) -> Any:
            if c.kind is CouplingKind.GENERAL:
                return {
                    "unitary": [
                        [{"re": z.real, "im": z.imag} for z in row] for row in c.unitary
                    ]
                }
            return c.kind.value

        return {
            "vertices": [
                {"id": v.id, "leads": v.leads, "coupling": coupling(v.coupling)}
                for v in self.vertices
            ],
            "edges": [
                {"id": e.id, "from": e.start, "to": e.end, "length": _fmt_fraction(e.length)}
                for e in self.edges
            ],
        }


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# --------------------------------------------------------------------------
# JSON input

def _parse_complex(entry: Any) -> complex:
    if isinstance(entry, dict):
        return complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    raise GraphFormatError(f"bad complex entry {entry!r}")


def _parse_coupling(raw: Any) -> Coupling:
    if raw is None:
        return STANDARD
    if isinstance(raw, str):
        try:
            kind = CouplingKind(raw.lower())
        except ValueError as exc:
            raise GraphFormatError(f"unknown coupling {raw!r}") from exc
        if kind is CouplingKind.GENERAL:
            raise GraphFormatError("general coupling needs a 'unitary' matrix")
        return Coupling(kind)
    if isinstance(raw, dict) and "unitary" in raw:
        rows = raw["unitary"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise GraphFormatError("unitary must be a list of rows")
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise GraphFormatError("unitary rows have unequal length")
        return Coupling(
            CouplingKind.GENERAL,
            tuple(tuple(_parse_complex(z) for z in row) for row in rows),
        )
    raise GraphFormatError(f"bad coupling {raw!r}")


def graph_from_dict(data: Any) -> MetricGraph:
    if not isinstance(data, dict):
        raise GraphFormatError("graph document must be an object")
    try:
        raw_vertices = data["vertices"]
        raw_edges = data.get("edges", [])
    except KeyError as exc:
        raise GraphFormatError(f"missing key {exc}") from exc
    if not isinstance(raw_vertices, list) or not isinstance(raw_edges, list):
        raise GraphFormatError("'vertices' and 'edges' must be lists")

    vertices = []
    for rv in raw_vertices:
        if not isinstance(rv, dict) or "id" not in rv:
            raise GraphFormatError(f"bad vertex record {rv!r}")
        leads = rv.get("leads", 0)
        if not isinstance(leads, int) or isinstance(leads, bool):
            raise GraphFormatError(f"vertex {rv['id']!r}: leads must be an integer")
        vertices.append(VertexSpec(str(rv["id"]), leads, _parse_coupling(rv.get("coupling"))))

    edges = []
    for i, re_ in enumerate(raw_edges):
        if not isinstance(re_, dict):
            raise GraphFormatError(f"bad edge record {re_!r}")
        try:
            start, end, length = re_["from"], re_["to"], re_["length"]
        except KeyError as exc:
            raise GraphFormatError(f"edge {i}: missing key {exc}") from exc
        edges.append(InternalEdge(str(re_.get("id", i + 1)), str(start), str(end), parse_length(length)))
    return MetricGraph(tuple(vertices), tuple(edges))


def loads_graph(text: str) -> MetricGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed JSON: {exc}") from exc
    return graph_from_dict(data)


def load_graph(path: str | Path) -> MetricGraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc}") from exc
    return loads_graph(text)


def dumps_graph(g: MetricGraph) -> str:
    return json.dumps(g.to_dict(), indent=2)


# --------------------------------------------------------------------------
# validation and structure

def validate_graph(g: MetricGraph) -> ValidationReport:
    problems: list[str] = []
    seen: set[str] = set()
    for v in g.vertices:
        if v.id in seen:
            problems.append(f"duplicate vertex id {v.id!r}")
        seen.add(v.id)
    edge_ids: set[str] = set()
    for e in g.edges:
        if e.id in edge_ids:
            problems.append(f"duplicate edge id {e.id!r}")
        edge_ids.add(e.id)
        for endpoint in (e.start, e.end):
            if not g.has_vertex(endpoint):
                problems.append(f"edge {e.id!r}: unknown vertex {endpoint!r}")
        if e.length <= 0:
            problems.append(f"edge {e.id!r}: nonpositive length {e.length}")

    for v in g.vertices:
        if v.leads < 0:
            problems.append(f"vertex {v.id!r}: negative lead count")
            continue
        d = g.degree(v.id)
        if d < 1:
            problems.append(f"vertex {v.id!r}: degree zero")
        c = v.coupling
        if c.kind is CouplingKind.DIRICHLET and d != 1:
            problems.append(f"vertex {v.id!r}: dirichlet coupling requires degree 1 (got {d})")
        if c.kind is CouplingKind.GENERAL:
            U = c.matrix()
            if U.shape != (d, d):
                problems.append(f"vertex {v.id!r}: matrix shape {U.shape} does not match degree {d}")
            elif not np.allclose(U @ U.conj().T, np.eye(d), rtol=0, atol=UNITARY_TOL):
                problems.append(f"vertex {v.id!r}: matrix not unitary")
    return ValidationReport(tuple(problems))


def require_valid(g: MetricGraph) -> None:
    report = validate_graph(g)
    if not report.ok:
        raise InvalidGraph(list(report.violations))


def balanced_vertices(g: MetricGraph) -> list[str]:
    """Vertices whose internal edge-end count equals their lead count."""
    return [v.id for v in g.vertices if v.leads > 0 and g.internal_degree(v.id) == v.leads]


@dataclass(frozen=True)
class StructuralFlags:
    equilateral: bool
    common_length: Fraction | None
    has_loops: bool
    has_parallel_edges: bool
    balanced_nonneighbor_count: int


def common_length(g: MetricGraph) -> Fraction | None:
    lengths = {e.length for e in g.edges}
    return lengths.pop() if len(lengths) == 1 else None


def balanced_nonneighbors(g: MetricGraph) -> list[str]:
    bal = balanced_vertices(g)
    bal_set = set(bal)
    return [v for v in bal if not (g.neighbors(v) & bal_set)]


def structural_flags(g: MetricGraph) -> StructuralFlags:
    ell = common_length(g)
    pairs: set[frozenset[str]] = set()
    parallel = False
    for e in g.edges:
        key = frozenset((e.start, e.end))
        if key in pairs:
            parallel = True
        pairs.add(key)
    return StructuralFlags(
        equilateral=g.N == 0 or ell is not None,
        common_length=ell,
        has_loops=any(e.is_loop for e in g.edges),
        has_parallel_edges=parallel,
        balanced_nonneighbor_count=len(balanced_nonneighbors(g)),
    )


def check_kinds(g: MetricGraph, allowed: Sequence[CouplingKind]) -> list[str]:
    """Ids of vertices whose coupling kind is not in ``allowed``."""
    return [v.id for v in g.vertices if v.coupling.kind not in allowed]

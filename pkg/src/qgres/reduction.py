"""Ghost-edge deletion at balanced vertices.

At a balanced standard vertex ``v`` of internal degree ``d`` the columns of
``S`` belonging to the ``d`` bonds that end at ``v`` sum to zero.  So one of
them, ``b1``, can be removed by the similarity transform ``V^-1 S V``, where
``V`` is the identity plus ones at ``(b_i, b1)`` for the sibling bonds
``b_i``.  Column ``b1`` becomes zero.  The row operation ``V^-1`` copies
minus row ``b1`` into each sibling row.  Those copies are the *ghost
entries*: zero-length transitions from bonds that end at ``source(b1)``
directly into the siblings, with amplitude opposite to the original
amplitude into ``b1``.

The determinant ``det(z S - I)`` is unchanged, so the reduced matrix feeds
the pseudo-orbit expansion just as well and makes zero powers of ``z``
visible.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .bondgraph import BondGraph, build_bond_graph
from .errors import ConsistencyError, GraphFormatError, PlanConflict, PreconditionViolated
from .exact import charpoly_zS_minus_I, format_number
from .graph import CouplingKind, MetricGraph, balanced_vertices, check_kinds, require_valid, structural_flags
from .secular import scattering_matrix


@dataclass(frozen=True)
class ReductionStep:
    vertex: str
    bond: int


@dataclass(frozen=True)
class ReductionPlan:
    steps: tuple[ReductionStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


@dataclass(frozen=True)
class GhostEntry:
    row: int
    column: int
    amplitude: Fraction


@dataclass
class ReducedSystem:
    S_reduced: np.ndarray
    zero_columns: set[int] = field(default_factory=set)
    ghost_entries: list[GhostEntry] = field(default_factory=list)

    def dump(self, labels: Sequence[str]) -> list[list[str]]:
        """Matrix as rows of ``p/q`` strings, headed by the bond labels."""
        return [list(labels)] + [[format_number(x) for x in row] for row in self.S_reduced]


# --------------------------------------------------------------------------
# preconditions

def check_graph(g: MetricGraph) -> None:
    """Graph-level assumptions of the deletion method."""
    require_valid(g)
    flags = structural_flags(g)
    if not flags.equilateral:
        raise PreconditionViolated("ghost-edge reduction needs an equilateral graph")
    if flags.has_loops:
        raise PreconditionViolated("ghost-edge reduction needs a graph without loops")
    if flags.has_parallel_edges:
        raise PreconditionViolated("ghost-edge reduction needs at most one edge between two vertices")
    bad = check_kinds(g, (CouplingKind.STANDARD, CouplingKind.DIRICHLET))
    if bad:
        raise PreconditionViolated(f"ghost-edge reduction needs standard or Dirichlet couplings (not at {bad})")


def check_step(g: MetricGraph, bg: BondGraph, step: ReductionStep) -> None:
    if not g.has_vertex(step.vertex):
        raise PreconditionViolated(f"unknown vertex {step.vertex!r}")
    v = g.vertex(step.vertex)
    if v.coupling.kind is not CouplingKind.STANDARD:
        raise PreconditionViolated(f"vertex {step.vertex!r} does not have standard coupling")
    if step.vertex not in balanced_vertices(g):
        raise PreconditionViolated(f"vertex {step.vertex!r} is not balanced")
    if not 0 <= step.bond < len(bg) or bg.bonds[step.bond].target != step.vertex:
        raise PreconditionViolated(f"bond {step.bond} does not end at vertex {step.vertex!r}")


def deletion_transform(g: MetricGraph, bond: int, bg: BondGraph | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``(V, V^-1)`` that zero column ``bond`` of ``S``; ``bond`` must end at a balanced vertex."""
    check_graph(g)
    bg = bg if bg is not None else build_bond_graph(g)
    if not 0 <= bond < len(bg):
        raise PreconditionViolated(f"bond {bond} out of range")
    check_step(g, bg, ReductionStep(bg.bonds[bond].target, bond))
    return _transform(bg, bond)


def _siblings(bg: BondGraph, bond: int) -> list[int]:
    return [b for b in bg.ending_at(bg.bonds[bond].target) if b != bond]


def _transform(bg: BondGraph, bond: int) -> tuple[np.ndarray, np.ndarray]:
    n = len(bg)
    V = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        V[i, i] = Fraction(1)
    Vinv = V.copy()
    for b in _siblings(bg, bond):
        V[b, bond] = Fraction(1)
        Vinv[b, bond] = Fraction(-1)
    return V, Vinv


# --------------------------------------------------------------------------

def apply_reduction(g: MetricGraph, plan: ReductionPlan, S: np.ndarray | None = None) -> ReducedSystem:
    """Apply the plan's deletions in order.  ``S`` defaults to the graph's bond-scattering matrix."""
    check_graph(g)
    bg = build_bond_graph(g)
    cur = np.array(scattering_matrix(g) if S is None else S, dtype=object)
    out = ReducedSystem(cur)
    ghost_targets: set[int] = set()
    used: set[str] = set()
    for step in plan:
        check_step(g, bg, step)
        if step.bond in ghost_targets:
            raise PlanConflict(f"bond {bg.labels()[step.bond]} received ghost entries and cannot be deleted")
        if step.vertex in used:
            raise PreconditionViolated(f"vertex {step.vertex!r} already has a deletion")
        used.add(step.vertex)
        V, Vinv = _transform(bg, step.bond)
        nxt = Vinv.dot(cur).dot(V)
        if any(x != 0 for x in nxt[:, step.bond]):
            raise ConsistencyError(f"column {step.bond} not cleared")
        for r in _siblings(bg, step.bond):
            for c in range(len(bg)):
                delta = nxt[r, c] - cur[r, c]
                if c != step.bond and delta != 0:
                    out.ghost_entries.append(GhostEntry(r, c, Fraction(delta)))
                    ghost_targets.add(r)
        cur = nxt
        out.zero_columns.add(step.bond)
    out.S_reduced = cur
    return out


def verify_reduction(S: np.ndarray, reduced: ReducedSystem | np.ndarray) -> bool:
    R = reduced.S_reduced if isinstance(reduced, ReducedSystem) else reduced
    return charpoly_zS_minus_I(np.asarray(S)) == charpoly_zS_minus_I(np.asarray(R))


def default_plan(g: MetricGraph) -> ReductionPlan:
    """One deletion per balanced standard vertex: the smallest-index incoming bond not hit by a ghost."""
    check_graph(g)
    bg = build_bond_graph(g)
    steps = []
    ghost_targets: set[int] = set()
    for vid in balanced_vertices(g):
        if g.vertex(vid).coupling.kind is not CouplingKind.STANDARD:
            continue
        free = [b for b in bg.ending_at(vid) if b not in ghost_targets]
        if not free:
            continue
        steps.append(ReductionStep(vid, free[0]))
        ghost_targets.update(_siblings(bg, free[0]))
    return ReductionPlan(tuple(steps))


def random_plan(g: MetricGraph, rng: random.Random) -> ReductionPlan:
    """A valid plan over a random subset of balanced vertices in random order."""
    check_graph(g)
    bg = build_bond_graph(g)
    verts = [v for v in balanced_vertices(g) if g.vertex(v).coupling.kind is CouplingKind.STANDARD]
    rng.shuffle(verts)
    verts = verts[: rng.randint(0, len(verts))]
    steps = []
    ghost_targets: set[int] = set()
    for vid in verts:
        free = [b for b in bg.ending_at(vid) if b not in ghost_targets]
        if free:
            b = rng.choice(free)
            steps.append(ReductionStep(vid, b))
            ghost_targets.update(_siblings(bg, b))
    return ReductionPlan(tuple(steps))


def plan_from_records(g: MetricGraph, records: Any) -> ReductionPlan:
    """Plan from ``[{"vertex": id, "bond": label-or-index}, ...]``."""
    if not isinstance(records, list):
        raise GraphFormatError("plan must be a list of {vertex, bond} records")
    bg = build_bond_graph(g)
    steps = []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or "vertex" not in rec or "bond" not in rec:
            raise GraphFormatError(f"plan record {i} needs 'vertex' and 'bond'")
        try:
            b = bg.index_of(rec["bond"])
        except KeyError as exc:
            raise GraphFormatError(f"plan record {i}: {exc.args[0]}") from None
        steps.append(ReductionStep(str(rec["vertex"]), b))
    return ReductionPlan(tuple(steps))


def load_plan(g: MetricGraph, path: str | Path) -> ReductionPlan:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphFormatError(f"cannot read plan: {exc}") from exc
    return plan_from_records(g, data)

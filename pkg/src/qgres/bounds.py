"""Structural upper bounds on the effective size and the rank criterion.

For an equilateral graph with standard coupling (Dirichlet leaves allowed):

* every balanced vertex removes at least ``ell/2`` from the effective size;
* a balanced vertex with no balanced neighbour removes another ``ell/2``;
* a square of balanced vertices without diagonals caps ``W`` at ``(N-3) ell``;
* ``rank S = 2N - n_bal`` always.  ``W`` falls strictly below
  ``N ell - (ell/2) n_bal`` exactly when ``rank S^2 < rank S``, i.e. when
  the zero eigenvalue has a nontrivial Jordan block.

The bounds are theorems, so ``bound_report`` raises ConsistencyError if the
computed ``W`` ever exceeds one of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import ConsistencyError, PreconditionViolated
from .exact import det_rank
from .graph import (
    CouplingKind,
    MetricGraph,
    balanced_nonneighbors,
    balanced_vertices,
    check_kinds,
    require_valid,
    structural_flags,
)
from .secular import classify_weyl, scattering_matrix


def _require_standard_equilateral(g: MetricGraph, simple: bool) -> Fraction:
    require_valid(g)
    flags = structural_flags(g)
    if not flags.equilateral or flags.common_length is None:
        raise PreconditionViolated("bounds need an equilateral graph with at least one edge")
    bad = check_kinds(g, (CouplingKind.STANDARD, CouplingKind.DIRICHLET))
    if bad:
        raise PreconditionViolated(f"bounds need standard coupling (Dirichlet leaves allowed); not at {bad}")
    if simple and flags.has_loops:
        raise PreconditionViolated("effective-size bounds assume a graph without loops")
    if simple and flags.has_parallel_edges:
        raise PreconditionViolated("effective-size bounds assume no parallel edges")
    return flags.common_length


@dataclass(frozen=True)
class MainBound:
    n_bal: int
    n_nonneig: int
    bound: Fraction


def bound_main(g: MetricGraph) -> MainBound:
    ell = _require_standard_equilateral(g, simple=True)
    n_bal = len(balanced_vertices(g))
    n_nonneig = len(balanced_nonneighbors(g))
    return MainBound(n_bal, n_nonneig, g.N * ell - ell / 2 * (n_bal + n_nonneig))


def detect_balanced_squares(g: MetricGraph) -> list[tuple[str, str, str, str]]:
    """Cycles ``v1 v2 v3 v4`` of balanced vertices with neither diagonal present."""
    _require_standard_equilateral(g, simple=True)
    bal = balanced_vertices(g)
    found = []
    for a, b, c, d in combinations(bal, 4):
        for cyc in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
            sides = all(g.adjacent(cyc[i], cyc[(i + 1) % 4]) for i in range(4))
            diagonals = g.adjacent(cyc[0], cyc[2]) or g.adjacent(cyc[1], cyc[3])
            if sides and not diagonals:
                found.append(cyc)
    return found


@dataclass(frozen=True)
class RankCriterion:
    rank_S: int
    rank_S2: int

    @property
    def strict(self) -> bool:
        return self.rank_S2 < self.rank_S


def check_rank_criterion(g: MetricGraph) -> RankCriterion:
    _require_standard_equilateral(g, simple=False)
    S = scattering_matrix(g)
    r1 = det_rank(S).rank
    r2 = det_rank(S.dot(S)).rank
    expected = 2 * g.N - len(balanced_vertices(g))
    if r1 != expected:
        raise ConsistencyError(f"rank S = {r1}, expected 2N - n_bal = {expected}")
    return RankCriterion(r1, r2)


@dataclass(frozen=True)
class BoundReport:
    N: int
    ell: Fraction
    volume: Fraction
    n_bal: int
    n_nonneig: int
    bound_bal: Fraction
    bound_main: Fraction
    squares: tuple[tuple[str, str, str, str], ...]
    bound_square: Fraction | None
    W_actual: Fraction
    rank_S: int
    rank_S2: int

    @property
    def rank_drop(self) -> bool:
        return self.rank_S2 < self.rank_S

    @property
    def tightest(self) -> Fraction:
        cands = [self.volume, self.bound_bal, self.bound_main]
        if self.bound_square is not None:
            cands.append(self.bound_square)
        return min(cands)

    def violations(self) -> list[str]:
        out = []
        for name in ("volume", "bound_bal", "bound_main", "bound_square"):
            b = getattr(self, name)
            if b is not None and self.W_actual > b:
                out.append(f"W = {self.W_actual} exceeds {name} = {b}")
        below_bal = self.W_actual < self.bound_bal
        if self.rank_drop != below_bal:
            out.append(f"rank criterion ({self.rank_drop}) disagrees with W < bound_bal ({below_bal})")
        return out


def bound_report(g: MetricGraph, check: bool = True) -> BoundReport:
    main = bound_main(g)
    ell = structural_flags(g).common_length
    squares = tuple(detect_balanced_squares(g))
    rank = check_rank_criterion(g)
    report = BoundReport(
        N=g.N,
        ell=ell,
        volume=g.volume,
        n_bal=main.n_bal,
        n_nonneig=main.n_nonneig,
        bound_bal=g.N * ell - ell / 2 * main.n_bal,
        bound_main=main.bound,
        squares=squares,
        bound_square=(g.N - 3) * ell if squares else None,
        W_actual=classify_weyl(g).W,
        rank_S=rank.rank_S,
        rank_S2=rank.rank_S2,
    )
    if check:
        bad = report.violations()
        if bad:
            raise ConsistencyError("; ".join(bad))
    return report

"""Command-line front end.

Each invocation runs one analysis on one graph file and prints either a
human-readable table or JSON records, one object per line.

Exit codes: 0 success, 1 unreadable or invalid input (also a failed
``verify``), 2 the input is outside an operation's domain.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, TextIO

from . import bounds as bounds_mod
from .bondgraph import build_bond_graph
from .errors import ConsistencyError, GraphFormatError, InvalidGraph, PreconditionError, QGraphError
from .exact import CLUSTER_TOL, format_complex, format_number
from .graph import MetricGraph, balanced_vertices, load_graph, structural_flags
from .orbits import DEFAULT_CAP, expansion_polynomial, orbit_report
from .reduction import apply_reduction, check_graph, default_plan, load_plan, verify_reduction
from .secular import (
    ResonanceFamily,
    classify_weyl,
    resonance_families,
    resonances_in_disc,
    scattering_matrix,
    secular_polynomial,
    secular_value,
    weyl_by_determinant,
)

COMMANDS = ("classify", "secular", "resonances", "orbits", "reduce", "bounds", "verify")


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str
    format: str = "table"
    plan: str | None = None
    cap: int = DEFAULT_CAP
    radius: float | None = None
    k: complex | None = None
    exact: bool = False
    cluster_tol: float = CLUSTER_TOL
    max_bonds: int | None = None


class Output:
    def __init__(self, cfg: RunConfig, stream: TextIO):
        self.records = cfg.format == "records"
        self.command = cfg.command
        self.stream = stream

    def line(self, text: str) -> None:
        if not self.records:
            print(text, file=self.stream)

    def record(self, kind: str, **fields) -> None:
        if self.records:
            print(json.dumps({"command": self.command, "kind": kind, **fields}), file=self.stream)


def in_ell(x: Fraction, ell: Fraction | None) -> str:
    """``x`` written as a multiple of the common edge length."""
    if ell is None:
        return format_number(x)
    return f"{format_number(Fraction(x) / ell)}·ℓ"


def _ell_line(out: Output, ell: Fraction | None) -> None:
    if ell is not None and ell != 1:
        out.line(f"ℓ = {format_number(ell)}")


# --------------------------------------------------------------------------

def cmd_classify(cfg: RunConfig, g: MetricGraph, out: Output) -> int:
    n_bal = len(balanced_vertices(g))
    if not structural_flags(g).equilateral and not cfg.exact:
        verdict = weyl_by_determinant(g)
        out.line(f"{verdict.value}, vol = {format_number(g.volume)} (effective size needs equal lengths)")
        out.line(f"n_bal = {n_bal}")
        out.record("classify", verdict=verdict.value, W=None, volume=format_number(g.volume), n_bal=n_bal)
        return 0
    if cfg.exact:
        _require_exact(g)
    wc = classify_weyl(g)
    out.line(f"{wc.verdict.value}, W = {in_ell(wc.W, wc.ell)}, vol = {in_ell(wc.volume, wc.ell)}")
    _ell_line(out, wc.ell)
    out.line(f"n_bal = {n_bal}, nonzero eigenvalues = {wc.degree} of {wc.two_n}")
    out.record(
        "classify",
        verdict=wc.verdict.value,
        W=format_number(wc.W),
        volume=format_number(wc.volume),
        ell=None if wc.ell is None else format_number(wc.ell),
        n_bal=n_bal,
        degree=wc.degree,
        two_n=wc.two_n,
    )
    return 0


def _require_exact(g: MetricGraph) -> None:
    from .errors import NotEquilateral, PreconditionViolated

    if not structural_flags(g).equilateral:
        raise NotEquilateral("--exact needs an equilateral graph")
    if not scattering_matrix(g).dtype == object:
        raise PreconditionViolated("--exact needs standard or Dirichlet couplings")


def cmd_secular(cfg: RunConfig, g: MetricGraph, out: Output) -> int:
    if cfg.k is not None:
        val = secular_value(g, cfg.k)
        out.line(f"det(exp(ikL) S(k) - I) at k = {format_complex(cfg.k)}: {format_complex(val)}")
        out.record("secular_value", k=format_complex(cfg.k), value=format_complex(val))
        if not structural_flags(g).equilateral:
            return 0
    if cfg.exact:
        _require_exact(g)
    sp = secular_polynomial(g)
    out.line(f"P(z) = {sp.poly}   with z = exp(ikℓ)")
    _ell_line(out, sp.ell)
    out.line(f"degree {sp.degree} of {sp.two_n}")
    out.record(
        "secular",
        coefficients=[format_number(sp.poly.coeff(i)) for i in range(sp.degree + 1)],
        degree=sp.degree,
        two_n=sp.two_n,
        ell=None if sp.ell is None else format_number(sp.ell),
    )
    return 0


def family_formula(f: ResonanceFamily) -> str:
    """Lattice ``k_n`` in units of ``1/ℓ``, symbolic for rational eigenvalues."""
    if f.exact_c is not None:
        c = f.exact_c
        real = "2nπ" if c > 0 else "(2n+1)π"
        r = abs(c)
        if r == 1:
            return f"k = (1/ℓ) {real}"
        return f"k = (1/ℓ)[{real} - i ln {format_number(1 / r)}]"
    shift = -f.phi
    return f"k = (1/ℓ)[2nπ + {shift:.12g} + {math.log(f.r):.12g} i]"


def cmd_resonances(cfg: RunConfig, g: MetricGraph, out: Output) -> int:
    if cfg.exact:
        _require_exact(g)
    sp = secular_polynomial(g)
    fams = resonance_families(g, sp, cluster_tol=cfg.cluster_tol)
    out.line(f"{len(fams)} families, {sum(f.multiplicity for f in fams)} eigenvalues (k-plane count, n ∈ Z)")
    _ell_line(out, sp.ell)
    for f in fams:
        c = format_number(f.exact_c) if f.exact_c is not None else format_complex(f.c)
        out.line(f"c = {c} (mult {f.multiplicity}): {family_formula(f)}")
        out.record(
            "family",
            c=c,
            multiplicity=f.multiplicity,
            r=f"{f.r:.12g}",
            phi=f"{f.phi:.12g}",
            k0=format_complex(f.k(0)),
            formula=family_formula(f),
        )
    if cfg.radius is not None:
        disc = resonances_in_disc(fams, cfg.radius)
        W = classify_weyl(g, sp).W
        expected = 2 / math.pi * float(W) * cfg.radius
        out.line(f"|k| <= {cfg.radius:g}: {disc.count} resonances (Weyl-type estimate (2/π)·W·R = {expected:.6g})")
        out.record(
            "disc",
            radius=cfg.radius,
            count=disc.count,
            estimate=expected,
            points=[[format_complex(k), m] for k, m in disc.points],
        )
    return 0


def cmd_orbits(cfg: RunConfig, g: MetricGraph, out: Output) -> int:
    matrix = None
    if cfg.plan:
        matrix = apply_reduction(g, load_plan(g, cfg.plan)).S_reduced
    max_bonds = cfg.max_bonds if cfg.max_bonds is not None else 2 * g.N
    rep = orbit_report(g, max_bonds, cap=cfg.cap, matrix=matrix)
    for t in sorted(rep.groups):
        pos = rep.groups[t]
        out.line(f"{t} bonds: {len(pos)} pseudo orbits, coefficient {format_number(rep.coefficient(t))}")
        for po in pos:
            cycles = " ".join("(" + " ".join(c) + ")" for c in rep.orbit_labels(po)) or "()"
            out.line(f"    {cycles}  m = {po.m}  A = {format_number(po.amplitude)}")
    for rec in rep.records():
        out.record("pseudo_orbit", **rec)
    return 0


def cmd_reduce(cfg: RunConfig, g: MetricGraph, out: Output) -> int:
    check_graph(g)
    plan = load_plan(g, cfg.plan) if cfg.plan else default_plan(g)
    labels = build_bond_graph(g).labels()
    red = apply_reduction(g, plan)
    ok = verify_reduction(scattering_matrix(g), red)
    dump = red.dump(labels)
    out.line("plan: " + (", ".join(f"{labels[s.bond]} at {s.vertex}" for s in plan) or "(empty)"))
    width = max(len(x) for row in dump for x in row)
    out.line(" " * (width + 1) + " ".join(x.rjust(width) for x in dump[0]))
    for lab, row in zip(labels, dump[1:]):
        out.line(lab.rjust(width) + " " + " ".join(x.rjust(width) for x in row))
    out.line("zero columns: " + ", ".join(labels[b] for b in sorted(red.zero_columns)))
    for ge in red.ghost_entries:
        out.line(f"ghost {labels[ge.column]} -> {labels[ge.row]}: {format_number(ge.amplitude)}")
    out.line(f"polynomial preserved: {'yes' if ok else 'NO'}")
    out.record(
        "reduction",
        plan=[{"vertex": s.vertex, "bond": labels[s.bond]} for s in plan],
        labels=labels,
        matrix=dump[1:],
        zero_columns=[labels[b] for b in sorted(red.zero_columns)],
        ghost_entries=[
            {"row": labels[ge.row], "column": labels[ge.column], "amplitude": format_number(ge.amplitude)}
            for ge in red.ghost_entries
        ],
        verified=ok,
    )
    return 0 if ok else 1


def cmd_bounds(cfg: RunConfig, g: MetricGraph, out: Output) -> int:
    rep = bounds_mod.bound_report(g)
    ell = rep.ell
    out.line(f"N = {rep.N}, n_bal = {rep.n_bal}, n_nonneig = {rep.n_nonneig}")
    out.line(f"volume        {in_ell(rep.volume, ell)}")
    out.line(f"bound (bal)   {in_ell(rep.bound_bal, ell)}")
    out.line(f"bound (main)  {in_ell(rep.bound_main, ell)}")
    if rep.squares:
        out.line(f"bound (square) {in_ell(rep.bound_square, ell)}  squares: {[list(s) for s in rep.squares]}")
    out.line(f"W             {in_ell(rep.W_actual, ell)}")
    out.line(f"rank S = {rep.rank_S}, rank S^2 = {rep.rank_S2}, Jordan block at 0: {'yes' if rep.rank_drop else 'no'}")
    _ell_line(out, ell)
    out.record(
        "bounds",
        N=rep.N,
        ell=format_number(ell),
        volume=format_number(rep.volume),
        n_bal=rep.n_bal,
        n_nonneig=rep.n_nonneig,
        bound_bal=format_number(rep.bound_bal),
        bound_main=format_number(rep.bound_main),
        squares=[list(s) for s in rep.squares],
        bound_square=None if rep.bound_square is None else format_number(rep.bound_square),
        W_actual=format_number(rep.W_actual),
        rank_S=rep.rank_S,
        rank_S2=rep.rank_S2,
        rank_drop=rep.rank_drop,
    )
    return 0


def cmd_verify(cfg: RunConfig, g: MetricGraph, out: Output) -> int:
    sp = secular_polynomial(g)
    exp = expansion_polynomial(g, cap=cfg.cap)
    same = exp.poly == sp.poly
    out.line(f"pseudo-orbit expansion equals det(zS - I): {'yes' if same else 'NO'}")
    out.record("expansion", equal=same, polynomial=str(sp.poly))
    reduced_ok: bool | None = None
    try:
        check_graph(g)
    except PreconditionError as exc:
        out.line(f"reduction check skipped: {exc}")
    else:
        plan = default_plan(g)
        reduced_ok = verify_reduction(scattering_matrix(g), apply_reduction(g, plan))
        out.line(f"reduction with default plan ({len(plan)} steps) preserves it: {'yes' if reduced_ok else 'NO'}")
    out.record("reduction", equal=reduced_ok)
    return 0 if same and reduced_ok is not False else 1


HANDLERS: dict[str, Callable[[RunConfig, MetricGraph, Output], int]] = {
    "classify": cmd_classify,
    "secular": cmd_secular,
    "resonances": cmd_resonances,
    "orbits": cmd_orbits,
    "reduce": cmd_reduce,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgres", description="Resonances of quantum graphs with leads.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", "-i", required=True, help="graph file (JSON)")
    p.add_argument("--format", choices=("table", "records"), default="table")
    p.add_argument("--plan", help="deletion plan file: JSON list of {vertex, bond}")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum number of orbits enumerated")
    p.add_argument("--radius", type=float, help="count resonances with |k| <= RADIUS")
    p.add_argument("--k", type=complex, help="evaluate the secular determinant at this k")
    p.add_argument("--exact", action="store_true", help="fail unless the exact rational path applies")
    p.add_argument("--cluster-tol", type=float, default=CLUSTER_TOL)
    p.add_argument("--max-bonds", type=int, help="largest pseudo orbit listed (default 2N)")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        input=ns.input,
        format=ns.format,
        plan=ns.plan,
        cap=ns.cap,
        radius=ns.radius,
        k=ns.k,
        exact=ns.exact,
        cluster_tol=ns.cluster_tol,
        max_bonds=ns.max_bonds,
    )


def run(cfg: RunConfig, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        g = load_graph(cfg.input)
    except (GraphFormatError, InvalidGraph) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    out = Output(cfg, stdout)
    try:
        return HANDLERS[cfg.command](cfg, g, out)
    except (GraphFormatError, InvalidGraph, ConsistencyError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except (PreconditionError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 2
    except QGraphError as exc:  # pragma: no cover
        print(f"error: {exc}", file=stderr)
        return 1


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

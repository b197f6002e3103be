"""Resonance condition, Weyl classification, effective size and resonance lattices.

For an equilateral graph with edge length ``ell`` and k-independent vertex
scattering, the resonance condition ``det(exp(ikL) S - I) = 0`` becomes a
polynomial ``P(z) = det(z S - I)`` in ``z = exp(ik ell)``.  Everything else
is read off ``P``:

* ``deg P`` is the number of nonzero eigenvalues of ``S``; the effective
  size is ``W = (ell/2) deg P`` and the graph is non-Weyl iff ``deg P < 2N``;
* every root ``z_j`` gives an eigenvalue ``c_j = 1/z_j`` and a lattice of
  resonances ``k = (-arg c_j + 2 n pi + i ln|c_j|) / ell``.

Resonances are counted in the k-plane, which double counts relative to
the energy plane.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bondgraph import bond_scattering, build_bond_graph
from .coupling import K_PROBES, detect_k_independence, vertex_scattering
from .errors import ConsistencyError, KDependentCoupling, NotEquilateral
from .exact import CLUSTER_TOL, Polynomial, charpoly_zS_minus_I, det_rank, roots
from .graph import CouplingKind, MetricGraph, balanced_vertices, require_valid, structural_flags

COMPLEX_TRIM_RTOL = 1e-10
MODULUS_SLACK = 1e-9
TRACE_TOL = 1e-9


@dataclass(frozen=True)
class SecularPolynomial:
    poly: Polynomial
    ell: Fraction | None
    two_n: int

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def n_zero_eigs(self) -> int:
        return self.two_n - self.degree

    @property
    def is_exact(self) -> bool:
        return self.poly.is_exact

    def __call__(self, z):
        return self.poly(z)


def scattering_matrix(g: MetricGraph) -> np.ndarray:
    """``S`` for a graph on the constant-coupling path: exact if possible, else complex.

    Raises KDependentCoupling when a general vertex fails the k-independence probe.
    """
    require_valid(g)
    S = bond_scattering(g)
    if S.is_exact:
        return S.exact
    for v in g.vertices:
        if v.coupling.kind is CouplingKind.GENERAL and g.internal_degree(v.id):
            if not detect_k_independence(vertex_scattering(g, v.id)):
                raise KDependentCoupling(f"vertex {v.id!r} has k-dependent effective scattering")
    return S.at(K_PROBES[0])


def _require_equilateral(g: MetricGraph) -> Fraction | None:
    flags = structural_flags(g)
    if not flags.equilateral:
        raise NotEquilateral("edge lengths differ; the secular polynomial needs a common length")
    return flags.common_length


def secular_polynomial(g: MetricGraph) -> SecularPolynomial:
    ell = _require_equilateral(g)
    S = scattering_matrix(g)
    P = charpoly_zS_minus_I(S)
    if not P.is_exact:
        P = P.trimmed(COMPLEX_TRIM_RTOL)
    return SecularPolynomial(P, ell, 2 * g.N)


class Verdict(str, enum.Enum):
    WEYL = "Weyl"
    NON_WEYL = "non-Weyl"


@dataclass(frozen=True)
class WeylClass:
    verdict: Verdict
    W: Fraction
    volume: Fraction
    ell: Fraction | None
    degree: int
    two_n: int

    @property
    def is_weyl(self) -> bool:
        return self.verdict is Verdict.WEYL


def classify_weyl(g: MetricGraph, secular: SecularPolynomial | None = None) -> WeylClass:
    sp = secular or secular_polynomial(g)
    deg = sp.degree
    two_n = sp.two_n
    if sp.is_exact and two_n:
        # leading coefficient of det(zS - I) is det S
        det_zero = sp.poly.coeff(two_n) == 0
        if det_zero != (deg < two_n):
            raise ConsistencyError("degree drop and det S disagree")
    W = (sp.ell / 2) * deg if sp.ell is not None else Fraction(0)
    verdict = Verdict.NON_WEYL if deg < two_n else Verdict.WEYL
    return WeylClass(verdict, W, g.volume, sp.ell, deg, two_n)


def cross_check_weyl_standard(g: MetricGraph) -> bool:
    """Non-Weyl from the polynomial agrees with the existence of a balanced vertex."""
    bad = [v.id for v in g.vertices if v.coupling.kind is CouplingKind.GENERAL]
    if bad:
        raise ValueError(f"cross-check needs standard/Dirichlet couplings (general at {bad})")
    return (not classify_weyl(g).is_weyl) == bool(balanced_vertices(g))


def weyl_by_determinant(g: MetricGraph, probes=K_PROBES, tol: float = 1e-10) -> Verdict:
    """Non-Weyl iff some vertex has ``det sigma_v(k) = 0`` at every probe k.

    Works for any lengths; used when the equilateral path is not available.
    """
    require_valid(g)
    for v in g.vertices:
        if not g.internal_degree(v.id):
            continue
        vs = vertex_scattering(g, v.id)
        if vs.is_exact:
            if det_rank(vs.exact).det == 0:
                return Verdict.NON_WEYL
        elif all(abs(np.linalg.det(vs.at(k))) < tol for k in probes):
            return Verdict.NON_WEYL
    return Verdict.WEYL


# --------------------------------------------------------------------------
# resonance lattices

@dataclass(frozen=True)
class ResonanceFamily:
    """Resonances ``k_n = (-phi + 2 n pi + i ln r) / ell`` generated by eigenvalue ``c = r e^{i phi}``."""

    c: complex
    multiplicity: int
    ell: float
    exact_c: Fraction | None = None

    @property
    def r(self) -> float:
        return abs(self.c)

    @property
    def phi(self) -> float:
        phi = cmath.phase(self.c)
        return math.pi if phi <= -math.pi else phi

    def k(self, n: int) -> complex:
        return complex(-self.phi + 2 * n * math.pi, math.log(self.r)) / self.ell

    def in_disc(self, R: float) -> list[complex]:
        im = math.log(self.r) / self.ell
        if abs(im) > R:
            return []
        half = math.sqrt(max(R * R - im * im, 0.0)) * self.ell
        # -phi + 2 n pi in [-half, half]
        lo = math.ceil((self.phi - half) / (2 * math.pi) - 1e-12)
        hi = math.floor((self.phi + half) / (2 * math.pi) + 1e-12)
        pts = [self.k(n) for n in range(lo, hi + 1)]
        return [k for k in pts if abs(k) <= R * (1 + 1e-12)]


def resonance_families(
    g: MetricGraph,
    secular: SecularPolynomial | None = None,
    cluster_tol: float = CLUSTER_TOL,
) -> list[ResonanceFamily]:
    sp = secular or secular_polynomial(g)
    if sp.degree < 1:
        return []
    ell = float(sp.ell)
    families = [
        ResonanceFamily(
            complex(1 / root.exact) if root.exact is not None else 1 / root.value,
            root.multiplicity,
            ell,
            1 / root.exact if root.exact is not None else None,
        )
        for root in roots(sp.poly, cluster_tol=cluster_tol)
    ]
    families.sort(key=lambda f: (-f.r, f.phi))
    for f in families:
        if f.r > 1 + MODULUS_SLACK:
            raise ConsistencyError(f"eigenvalue {f.c} has modulus above 1")
    if not structural_flags(g).has_loops:
        trace = sum(f.c * f.multiplicity for f in families)
        if abs(trace) > TRACE_TOL * max(1, sp.degree):
            raise ConsistencyError(f"eigenvalue sum {trace} is not zero on a loop-free graph")
    return families


@dataclass(frozen=True)
class DiscCount:
    count: int
    points: list[tuple[complex, int]]


def resonances_in_disc(families: list[ResonanceFamily], R: float, ell=None) -> DiscCount:
    """All lattice points with ``|k| <= R``, counted with multiplicity.

    ``ell`` overrides the length stored in the families when given.
    """
    if R <= 0:
        raise ValueError("radius must be positive")
    points: list[tuple[complex, int]] = []
    for f in families:
        fam = f if ell is None else ResonanceFamily(f.c, f.multiplicity, float(ell), f.exact_c)
        points.extend((k, f.multiplicity) for k in fam.in_disc(R))
    points.sort(key=lambda p: (abs(p[0]), p[0].real, p[0].imag))
    return DiscCount(sum(m for _, m in points), points)


# --------------------------------------------------------------------------

def secular_value(g: MetricGraph, k: complex) -> complex:
    """``det(exp(ikL) S(k) - I)`` for any valid graph and admissible k."""
    require_valid(g)
    bg = build_bond_graph(g)
    n = len(bg)
    if n == 0:
        return 1.0 + 0j
    S = bond_scattering(g, bg).at(k)
    phases = np.exp(1j * k * np.array([float(x) for x in bg.lengths]))
    return complex(np.linalg.det(phases[:, None] * S - np.eye(n)))

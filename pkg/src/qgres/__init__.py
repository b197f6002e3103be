"""Resolvent resonances of quantum graphs with attached leads.

Secular polynomials, Weyl/non-Weyl classification, effective size,
resonance lattices, pseudo-orbit expansions, ghost-edge reductions and
structural bounds.  Equilateral graphs with standard or Dirichlet coupling
are handled in exact rational arithmetic.
"""

from .bondgraph import BondGraph, BondMatrix, assemble_sigma, bond_scattering, build_bond_graph
from .bounds import BoundReport, bound_main, bound_report, check_rank_criterion, detect_balanced_squares
from .coupling import (
    CouplingBlocks,
    detect_k_independence,
    effective_coupling,
    effective_vertex_scattering,
    vertex_scattering,
)
from .errors import (
    CapExceeded,
    ConsistencyError,
    GraphFormatError,
    InvalidGraph,
    KDependentCoupling,
    NoConvergence,
    NotEquilateral,
    PlanConflict,
    PreconditionError,
    PreconditionViolated,
    QGraphError,
    SingularPivot,
)
from .exact import Polynomial, charpoly, charpoly_zS_minus_I, det_rank, roots
from .graph import (
    Coupling,
    InternalEdge,
    MetricGraph,
    VertexSpec,
    balanced_vertices,
    load_graph,
    loads_graph,
    structural_flags,
    validate_graph,
)
from .orbits import enumerate_cycles, expansion_from_matrix, expansion_polynomial, orbit_report
from .reduction import (
    ReductionPlan,
    ReductionStep,
    apply_reduction,
    default_plan,
    deletion_transform,
    verify_reduction,
)
from .secular import (
    classify_weyl,
    resonance_families,
    resonances_in_disc,
    scattering_matrix,
    secular_polynomial,
    secular_value,
)

__all__ = [name for name in dir() if not name.startswith("_")]

"""Ricci flow and Lie bracket flow on metric nilpotent Lie algebras with diagonal metrics."""

from .algebra import (
    BracketSpec,
    DiagonalMetric,
    JacobiReport,
    RootSystem,
    ad_matrix,
    nilpotency_class,
    parse_scalar,
    rescaled_constants,
    root_system,
    structure_vector,
    validate_jacobi,
)
from .curvature import (
    RicciData,
    SolitonCertificate,
    find_soliton_metric,
    is_ricci_diagonal,
    is_stably_ricci_diagonal,
    positive_gram_solution,
    ricci_form_oracle,
    ricci_vector,
    soliton_test,
    verify_derivation,
)
from .errors import *  # noqa: F401,F403
from .flow import (
    CollapseReport,
    FlowState,
    IntegratorConfig,
    Trajectory,
    collapse_analysis,
    conserved_monomials,
    initial_state,
    integrate,
    integrate_many,
    monitor_invariants,
    soliton_trajectory,
    volume_normalize,
)
from .projective import (
    Equilibrium,
    EquilibriumSet,
    ProjectiveSystem,
    build_projective_system,
    equilibria,
    integrate_projective,
    repelling_certificate,
    s_from_a,
)

__version__ = "0.1.0"

"""Lotka-Volterra growth models, their Hamiltonian structure and the
production functions obtained from their conserved quantities."""

from ._core import (
    BiHamiltonianParams,
    CobbDouglasPF,
    CoeffSolution,
    DebtModel,
    DebtPF,
    DimensionError,
    DomainError,
    Error,
    IntegrationError,
    IoError,
    LogisticModel,
    LogisticPF,
    SatoModel,
    SShapedPF,
    SingularityError,
    StructureCheck,
    Trajectory,
    ValidationError,
    bihamiltonian_ab,
    fit_cobb_douglas,
    fit_logistic_pf,
    from_log_coords,
    model_rhs,
    sato_divergence,
    sato_solve_c,
    simulate,
    solve_bihamiltonian_pf,
    solve_debt_pf,
    solve_logistic_pf,
    solve_sato_pf,
    surface_residual,
    to_log_coords,
    verify_structure,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

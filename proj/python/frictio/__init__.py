"""Quasi-static frictional contact with Coulomb friction and unilateral contact."""

from ._frictio import (
    ContactState,
    FrictioError,
    Stiffness,
    check_incremental_kkt,
    consistent_edge_load,
    continuum_family,
    critical_friction,
    lipschitz_probe,
    march_paper_jump,
    march_polyline,
    paper_jump_state,
    solve_incremental,
    solve_triangle,
    subdivision,
    tresca_minimize,
    triangle_condensed_stiffness,
)

__all__ = [
    "ContactState",
    "FrictioError",
    "Stiffness",
    "check_incremental_kkt",
    "consistent_edge_load",
    "continuum_family",
    "critical_friction",
    "lipschitz_probe",
    "march_paper_jump",
    "march_polyline",
    "paper_jump_state",
    "solve_incremental",
    "solve_triangle",
    "subdivision",
    "tresca_minimize",
    "triangle_condensed_stiffness",
]

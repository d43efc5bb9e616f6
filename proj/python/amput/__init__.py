"""American put free boundary in canonical heat-equation coordinates."""

from ._amput import (
    Boundary,
    NoConvergence,
    b1,
    balayage_residual,
    balayage_rhs,
    eta,
    first_moment,
    flux_identity,
    from_market,
    heat_extension,
    lattice_boundary,
    lattice_price,
    mu,
    phi_transform,
    read_boundary_csv,
    report,
    reward,
    solve,
    taylor_remainder,
    write_boundary_csv,
)

__all__ = [
    "Boundary",
    "NoConvergence",
    "b1",
    "balayage_residual",
    "balayage_rhs",
    "eta",
    "first_moment",
    "flux_identity",
    "from_market",
    "heat_extension",
    "lattice_boundary",
    "lattice_price",
    "mu",
    "phi_transform",
    "read_boundary_csv",
    "report",
    "reward",
    "solve",
    "taylor_remainder",
    "write_boundary_csv",
]

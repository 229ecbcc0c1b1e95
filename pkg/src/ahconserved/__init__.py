"""Conserved quantities of asymptotically hyperbolic initial data from expansion coefficients."""
from .conserved import (
    ConservedSet,
    MissingMatterField,
    NonzeroMomentum,
    NullOrSpacelikeMomentum,
    angular_momentum,
    boost_energy,
    center_of_mass,
    com_via_embedding,
    conserved_set,
    energy_momentum,
    finiteness_obstruction,
    mass_aspect,
    matter_loss_rate,
    rest_frame,
    vacuum_loss_rate,
)
from .data import (
    AHExpansionData,
    BoostVector,
    DataFormatError,
    generate,
    read_data,
    validate,
    write_data,
)
from .embedding import (
    OptimalSolution,
    assemble_rhs,
    solve,
)
from .geometry import (
    EmbeddingLinearization,
    ExpansionFit,
    IllConditionedFit,
    NonSpacelikeH,
    SolverFailure,
    SphereExpansion,
    adjudicate_trace_variant,
    boosted_expansion,
    coordinate_sphere_expansion,
    extract_expansion,
    finite_r_mean_curvature,
    gauss_curvature_check,
    solve_linearized_embedding,
)
from .sphere import (
    KernelObstruction,
    OneFormField,
    ScalarField,
    SphereGrid,
    SymTensorField,
    YlmSpectrum,
    sphere_grid,
)

__version__ = "0.1.0"

__all__ = [
    "adjudicate_trace_variant",
    "AHExpansionData",
    "angular_momentum",
    "assemble_rhs",
    "boost_energy",
    "boosted_expansion",
    "BoostVector",
    "center_of_mass",
    "com_via_embedding",
    "conserved_set",
    "ConservedSet",
    "coordinate_sphere_expansion",
    "DataFormatError",
    "EmbeddingLinearization",
    "energy_momentum",
    "ExpansionFit",
    "extract_expansion",
    "finite_r_mean_curvature",
    "finiteness_obstruction",
    "gauss_curvature_check",
    "generate",
    "IllConditionedFit",
    "KernelObstruction",
    "mass_aspect",
    "matter_loss_rate",
    "MissingMatterField",
    "NonSpacelikeH",
    "NonzeroMomentum",
    "NullOrSpacelikeMomentum",
    "OneFormField",
    "OptimalSolution",
    "read_data",
    "rest_frame",
    "ScalarField",
    "solve",
    "solve_linearized_embedding",
    "SolverFailure",
    "sphere_grid",
    "SphereExpansion",
    "SphereGrid",
    "SymTensorField",
    "vacuum_loss_rate",
    "validate",
    "write_data",
    "YlmSpectrum",
]

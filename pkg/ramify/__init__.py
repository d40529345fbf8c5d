from .analytic import (
    CountingReport,
    DensityParams,
    LOParams,
    SimulationStats,
    contradiction_x,
    layer_extended_density,
    lo_bound,
    log_discriminant,
    logint,
    simulate_matrix,
    split_density,
)
from .config import RunConfig, resolve_config
from .errors import (
    CannotAdjustError,
    DomainError,
    ExponentRangeError,
    InconsistentLiftError,
    InvalidCocycleError,
    ModelInconsistencyError,
    ModelValidationError,
    NotComplementaryError,
    PartialSearchError,
    PreconditionError,
    SingularMatrixError,
    UnsupportedConfigurationError,
)
from .groups import (
    NoSection,
    SectionFound,
    SemidirectElement,
    chebotarev_class,
    closure,
    element_order,
    layer_centralizer_order,
    section_search,
)
from .lifter import (
    ChainReport,
    LiftState,
    generate_model,
    introduce_ramification,
    ordinary_pass,
    repair_pass,
    run,
    stabilized_u,
    verify_chain,
)
from .localdims import (
    LocalDims,
    h1_ord_dim,
    local_h_dims,
    subspace_decompose,
)
from .models import GlobalClass, GlobalModel, PlaceDescriptor, PrimeSpec, StageSpec
from .tame import (
    Cocycle,
    LocalRep,
    TameModel,
    act,
    adjust_to_special,
    classify,
    cocycle_space,
    normalize_to_special,
)
from .trace import LiftTrace, TraceEvent
from .validations import ValidatedModel, validate_global_model
from .zmod import Mat2, Residue, TraceZeroMat, hensel_diagonalize, teichmuller

__all__ = [
    "Mat2",
    "Residue",
    "TraceZeroMat",
    "teichmuller",
    "hensel_diagonalize",
    "TameModel",
    "Cocycle",
    "LocalRep",
    "cocycle_space",
    "classify",
    "act",
    "normalize_to_special",
    "adjust_to_special",
    "PlaceDescriptor",
    "LocalDims",
    "local_h_dims",
    "h1_ord_dim",
    "subspace_decompose",
    "closure",
    "section_search",
    "NoSection",
    "SectionFound",
    "SemidirectElement",
    "element_order",
    "layer_centralizer_order",
    "chebotarev_class",
    "GlobalModel",
    "GlobalClass",
    "PrimeSpec",
    "StageSpec",
    "ValidatedModel",
    "validate_global_model",
    "LiftState",
    "LiftTrace",
    "TraceEvent",
    "ChainReport",
    "introduce_ramification",
    "repair_pass",
    "ordinary_pass",
    "run",
    "verify_chain",
    "stabilized_u",
    "generate_model",
    "logint",
    "DensityParams",
    "LOParams",
    "CountingReport",
    "SimulationStats",
    "split_density",
    "layer_extended_density",
    "lo_bound",
    "log_discriminant",
    "contradiction_x",
    "simulate_matrix",
    "RunConfig",
    "resolve_config",
    "DomainError",
    "SingularMatrixError",
    "PreconditionError",
    "UnsupportedConfigurationError",
    "InvalidCocycleError",
    "ExponentRangeError",
    "InconsistentLiftError",
    "NotComplementaryError",
    "ModelValidationError",
    "CannotAdjustError",
    "ModelInconsistencyError",
    "PartialSearchError",
]

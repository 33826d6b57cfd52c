"""Solutions of the Chisini functional equation ``F = delta_F o G``.

The main entry points are :func:`metric_solution` (the level-set metric
interpolation ``M_F``), :func:`q_solution` (quasi-inverse solutions ``g o F``),
:func:`idempotize`, :func:`check_solvable` and :func:`continuity_certificate`.
"""
from .catalog import catalog, from_spec, names, parse_spec
from .config import DEFAULT_CONFIG, SolverConfig
from .domain import (
    Box,
    Function,
    FunctionHandle,
    FunctionMeta,
    Interval,
    MonotoneGridFunction,
    Permutation,
    Univariate,
    compose_inner,
    diagonal,
    dualize,
    load_grid_file,
    permute_args,
    restrict,
    transform_values,
)
from .errors import (
    ChisiniError,
    UnboundedDomain,
    PointOutOfBox,
    ArityMismatch,
    NotSubinterval,
    InvalidGrid,
    UnknownFunction,
    InvalidParams,
    NotMonotone,
    NotInRange,
    PreconditionFailed,
    GridTooLarge,
    Unsolvable,
    NotIdempotizable,
    GeneratorNotMonotone,
)
from .levelset import (
    LevelData,
    brute_force_distances,
    corrected_distances,
    level_data,
    level_data_batch,
)
from .mono1d import (
    check_idempotency_equation,
    level_interval,
    quasi_inverse,
    recognize_clamp,
    strictness_test,
)
from .solver import (
    ChisiniSolution,
    SolvabilityReport,
    check_solvable,
    conjugated_level_mean,
    factorize_transformed_continuous,
    idempotize,
    metric_solution,
    q_solution,
)
from .verify import ContinuityCertificate, PropertyReport, continuity_certificate, run_property_suite

__version__ = "0.1.0"

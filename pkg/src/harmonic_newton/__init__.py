"""Zeros of planar harmonic maps ``f = h + conj(g)`` by the harmonic Newton method."""
__version__ = "0.1.0"

from .certify import (
    ConvergenceDisk,
    KantorovichCertificate,
    SecondDerivativeBound,
    kantorovich,
    kantorovich_from_constants,
    mysovskii_disk,
    sup_second_derivatives,
)
from .errors import (
    DegenerateConstant,
    EvaluationError,
    HarmonicNewtonError,
    MissingDerivative,
    NoUniqueSolution,
    NotSingularZero,
    SeedBranchError,
)
from .estimator import HarmonicNewtonZeros, resolve_map
from .harmonic_map import (
    BUILTINS,
    HarmonicMap,
    Orientation,
    RationalPair,
    classify_orientation,
    function_spec_from_json,
    harmonic_polynomial,
    jacobian,
    load_function_spec,
    make_builtin,
    make_rational_pair,
)
from .laurent import QuadratureConfig, default_radius, laurent_coefficients
from .newton import (
    BatchResult,
    IterationOutcome,
    SingularJacobian,
    Status,
    StoppingConfig,
    iterate,
    iterate_arrays,
    iterate_batch,
    orbits,
    step_general,
    step_harmonic,
    step_linsys,
)
from .search import (
    cluster_labels,
    BasinLabeling,
    GridSpec,
    ZeroRecord,
    cluster_zeros,
    find_zeros,
    label_basins,
    make_grid,
    match_to_zeros,
    suspect_nonisolated,
    zeros_to_csv,
    zeros_to_json,
)
from .seeding import (
    LaurentData,
    NormalFormData,
    infinity_seeds,
    laurent_data,
    laurent_data_at_infinity,
    normal_form,
    pole_seeds,
    singular_seeds,
    solve_linear_harmonic,
)
from .viz import RasterImage, phase_color, render_basins, render_phase, write_ppm

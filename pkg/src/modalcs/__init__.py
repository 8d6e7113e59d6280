"""Mode-shape and frequency estimation from compressive vibration samples.

The pipeline: solve an MDOF system for its modal basis, sample the analytic
response on a uniform or random schedule (optionally compressing with a
random matrix), and recover mode shapes as left singular vectors of the
data matrix.  Companion modules provide the sampling-requirement bounds,
classical baselines (FDD, sparse reconstruction), and the experiment
harness behind the ``modal-cs`` CLI.
"""

from .baselines import (
    CsdCube,
    SparseRecovery,
    fdd_peaks,
    sparse_reconstruct,
    welch_csd,
)
from .bounds import (
    BoundReport,
    ExpectedGram,
    SamplingPlan,
    bound_report,
    expected_gram_random,
    gershgorin_uniform_bound,
    gram_deviation,
    harmonic_number_bounds,
    jl_requirements,
    jl_tail_rate,
    kl_div,
    mode_error_bound,
    psinc,
    random_requirements,
    sep_values,
    uniform_requirements,
)
from .config import (
    CONFIG_SCHEMA,
    EXPERIMENTS,
    ExperimentConfig,
    build_basis,
    build_system,
    preset,
    preset_config,
)
from .errors import (
    ConfigError,
    DimensionMismatch,
    DomainError,
    InsufficientPeaks,
    InvalidArgument,
    IoError,
    ModalcsError,
    NoConvergence,
    NonPositiveEigenvalue,
    NonUniformInput,
    NonUniformSchedule,
    NotSymmetric,
    ParseError,
    RaggedRows,
    ShapeError,
)
from .estimator import (
    ModeEstimate,
    align_and_error,
    aligned_distance,
    estimate_frequencies,
    estimate_modes,
    frequency_spectra,
    greedy_correlation_match,
)
from .mdof import (
    MdofSystem,
    ModalBasis,
    SdofParams,
    analytic_from_real,
    canonical_sign,
    evaluate_analytic,
    evaluate_displacement,
    sdof_response_params,
    solve_modes,
)
from .results import (
    ResultTable,
    emit_plot_data,
    load_sensor_csv,
    save_sensor_csv,
    write_result_csv,
)
from .runner import run_experiment
from .sampling import (
    DataMatrix,
    JlMatrix,
    SampleSchedule,
    SteeringMatrix,
    build_data_matrix,
    build_steering,
    compress,
    draw_jl_matrix,
    random_schedule,
    rng_from_seed,
    spawn_seeds,
    uniform_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CONFIG_SCHEMA",
    "ConfigError",
    "CsdCube",
    "DataMatrix",
    "DimensionMismatch",
    "DomainError",
    "EXPERIMENTS",
    "ExpectedGram",
    "ExperimentConfig",
    "InsufficientPeaks",
    "InvalidArgument",
    "IoError",
    "JlMatrix",
    "MdofSystem",
    "ModalBasis",
    "ModalcsError",
    "ModeEstimate",
    "NoConvergence",
    "NonPositiveEigenvalue",
    "NonUniformInput",
    "NonUniformSchedule",
    "NotSymmetric",
    "ParseError",
    "RaggedRows",
    "ResultTable",
    "SampleSchedule",
    "SamplingPlan",
    "SdofParams",
    "ShapeError",
    "SparseRecovery",
    "SteeringMatrix",
    "align_and_error",
    "aligned_distance",
    "analytic_from_real",
    "bound_report",
    "build_basis",
    "build_data_matrix",
    "build_steering",
    "build_system",
    "canonical_sign",
    "compress",
    "draw_jl_matrix",
    "emit_plot_data",
    "estimate_frequencies",
    "estimate_modes",
    "evaluate_analytic",
    "evaluate_displacement",
    "expected_gram_random",
    "fdd_peaks",
    "frequency_spectra",
    "gershgorin_uniform_bound",
    "gram_deviation",
    "greedy_correlation_match",
    "harmonic_number_bounds",
    "jl_requirements",
    "jl_tail_rate",
    "kl_div",
    "load_sensor_csv",
    "mode_error_bound",
    "preset",
    "preset_config",
    "psinc",
    "random_requirements",
    "random_schedule",
    "rng_from_seed",
    "run_experiment",
    "save_sensor_csv",
    "sdof_response_params",
    "sep_values",
    "solve_modes",
    "spawn_seeds",
    "uniform_requirements",
    "uniform_schedule",
    "welch_csd",
    "write_result_csv",
]

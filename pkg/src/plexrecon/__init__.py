"""plexrecon: reconstruct sparse multiplex networks from partial observations.

The package pairs a configuration-model expectation-maximization solver (and
a cross-layer aggregation variant plus a random baseline) with the masking,
metric and experiment machinery needed to evaluate reconstructions under
class imbalance.
"""

from .core import (
    LayerGraph,
    LayerStats,
    MultiplexNetwork,
    ValidationReport,
    aggregate_or,
    layer_stats,
    validate,
)
from .errors import (
    CoverageError,
    EmptyLayerError,
    EmptyNetworkError,
    FeasibilityError,
    GenerationError,
    ParseError,
    SolverError,
)
from .generate import (
    PoissonLaw,
    PowerLawLaw,
    SyntheticSpec,
    generate_multiplex,
    link_probability,
    sample_layer,
)
from .harness import (
    ExperimentConfig,
    RunRecord,
    SummaryRow,
    run_experiment,
    summarize,
)
from .io_formats import (
    load_multiplex,
    parse_multiplex,
    serialize_multiplex,
    write_results,
    write_trace,
)
from .metrics import (
    ConfusionCounts,
    MetricReport,
    confusion,
    gmean,
    mae_delta,
    mcc,
    metric_report,
)
from .observe import ObservationMask, ObservedMultiplex, apply_mask, sample_mask
from .solver import (
    BeliefState,
    Reconstruction,
    SolverConfig,
    a_step,
    e_step,
    initialize,
    m_step,
    m_step_exact,
    random_baseline,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "BeliefState",
    "ConfusionCounts",
    "CoverageError",
    "EmptyLayerError",
    "EmptyNetworkError",
    "ExperimentConfig",
    "FeasibilityError",
    "GenerationError",
    "LayerGraph",
    "LayerStats",
    "MetricReport",
    "MultiplexNetwork",
    "ObservationMask",
    "ObservedMultiplex",
    "ParseError",
    "PoissonLaw",
    "PowerLawLaw",
    "Reconstruction",
    "RunRecord",
    "SolverConfig",
    "SolverError",
    "SummaryRow",
    "SyntheticSpec",
    "ValidationReport",
    "a_step",
    "aggregate_or",
    "apply_mask",
    "confusion",
    "e_step",
    "generate_multiplex",
    "gmean",
    "initialize",
    "layer_stats",
    "link_probability",
    "load_multiplex",
    "m_step",
    "m_step_exact",
    "mae_delta",
    "mcc",
    "metric_report",
    "parse_multiplex",
    "random_baseline",
    "run",
    "run_experiment",
    "sample_layer",
    "sample_mask",
    "serialize_multiplex",
    "summarize",
    "validate",
    "write_results",
    "write_trace",
]

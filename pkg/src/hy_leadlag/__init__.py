from .analyze import (
    montecarlo_table,
    prop1_moments,
    rate_study,
    realized_volatility,
    signature_plot,
    subsample,
    table_grid,
)
from .core import (
    build_intervals,
    contrast_curve,
    estimate_leadlag,
    hy_contrast,
    mesh_delta,
    overlaps,
    synchronous_contrast,
)
from .errors import IngestError, InvalidInputError, LeadLagError
from .models import (
    BachelierParams,
    ContrastCurve,
    IntervalFamily,
    LeadLagEstimate,
    MomentCheck,
    MonteCarloReport,
    PathPair,
    RateRow,
    SamplingScheme,
    ShiftGrid,
    SignaturePlot,
    Synchronous,
    TickSeries,
    UniformRandom,
)
from .simulate import hat_function, sample, simulate_bachelier
from .utils import DEFAULT_RESOLUTION, derive_seed, format_ticks, to_ticks

__all__ = [
    "DEFAULT_RESOLUTION",
    "BachelierParams",
    "ContrastCurve",
    "IngestError",
    "IntervalFamily",
    "InvalidInputError",
    "LeadLagError",
    "LeadLagEstimate",
    "MomentCheck",
    "MonteCarloReport",
    "PathPair",
    "RateRow",
    "SamplingScheme",
    "ShiftGrid",
    "SignaturePlot",
    "Synchronous",
    "TickSeries",
    "UniformRandom",
    "build_intervals",
    "contrast_curve",
    "derive_seed",
    "estimate_leadlag",
    "format_ticks",
    "hat_function",
    "hy_contrast",
    "mesh_delta",
    "montecarlo_table",
    "overlaps",
    "prop1_moments",
    "rate_study",
    "realized_volatility",
    "sample",
    "signature_plot",
    "simulate_bachelier",
    "subsample",
    "synchronous_contrast",
    "table_grid",
    "to_ticks",
]

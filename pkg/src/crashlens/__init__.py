"""crashlens: market-crash detection from correlation networks of
mode-decomposed return series.

The library decomposes multi-asset return series (EMD, ITD, or the chained
extractor), builds rolling correlation networks filtered to MST or PMFG
graphs, and flags crashes as robust-z peaks in time-varying closeness
centrality.  A Pauli-matrix behavior algebra with an eight-state classifier
covers the market-regime side.  `crashlens.cli` and `crashlens.service`
expose the same pipeline as a command-line tool and an HTTP service.
"""

from .analytic import AnalyticSignal, analytic_signal, elliptic_angle, hyperbolic_angle
from .behavior import (
    BehaviorMatrix,
    MarketState,
    classify_state,
    commutator,
    pauli,
    wilson_loop,
)
from .corrnet import (
    CorrelationMatrix,
    DistanceMatrix,
    average_correlation,
    correlation_distance,
    correlation_matrix,
    equilibrium_indicator,
    hyperbolic_distance,
    hyperbolic_map,
    partial_correlation,
    partial_correlation_matrix,
    tensor_average_correlation,
    tensor_correlation,
)
from .decompose import (
    ModeDecomposition,
    SiftConfig,
    emd,
    itd,
    itd_imf_chain,
    reconstruct,
)
from .detect import (
    CentralitySeries,
    CrashEvent,
    detect_crashes,
    events_to_json,
    summarize_centrality,
)
from .errors import CrashlensError, DataError, UsageError
from .marketdata import (
    PriceTable,
    ReturnTable,
    TableSchema,
    WindowView,
    compute_log_returns,
    dump_wide_csv,
    load_price_table,
    window_slices,
)
from .netgraph import (
    MarketGraph,
    build_pmfg,
    closeness_centrality,
    export_graph,
    mst,
    pmfg,
    shortest_path_distances,
)
from .pipeline import (
    AnalysisReport,
    PipelineConfig,
    emit_plot_data,
    load_config,
    run_pipeline,
    snapshot_graph,
)
from .synthetic import synthetic_crash_prices

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "AnalyticSignal",
    "BehaviorMatrix",
    "CentralitySeries",
    "CorrelationMatrix",
    "CrashEvent",
    "CrashlensError",
    "DataError",
    "DistanceMatrix",
    "MarketGraph",
    "MarketState",
    "ModeDecomposition",
    "PipelineConfig",
    "PriceTable",
    "ReturnTable",
    "SiftConfig",
    "TableSchema",
    "UsageError",
    "WindowView",
    "analytic_signal",
    "average_correlation",
    "build_pmfg",
    "classify_state",
    "closeness_centrality",
    "commutator",
    "compute_log_returns",
    "correlation_distance",
    "correlation_matrix",
    "detect_crashes",
    "dump_wide_csv",
    "elliptic_angle",
    "emd",
    "emit_plot_data",
    "equilibrium_indicator",
    "events_to_json",
    "export_graph",
    "hyperbolic_angle",
    "hyperbolic_distance",
    "hyperbolic_map",
    "itd",
    "itd_imf_chain",
    "load_config",
    "load_price_table",
    "mst",
    "partial_correlation",
    "partial_correlation_matrix",
    "pauli",
    "pmfg",
    "reconstruct",
    "run_pipeline",
    "shortest_path_distances",
    "snapshot_graph",
    "summarize_centrality",
    "synthetic_crash_prices",
    "tensor_average_correlation",
    "tensor_correlation",
    "wilson_loop",
    "window_slices",
    "__version__",
]

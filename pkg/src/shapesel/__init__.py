"""shapesel: selective time-series forecasting with learned shapelets.

Learn which context patterns precede a forecaster's worst windows
(shift-invariant dictionary learning on high-error validation
contexts), then abstain on test windows whose contexts match those
patterns, trading a chosen fraction of coverage for lower error.
"""

from .data import (SplitSpec, TimeSeries, Window, WindowSet, load_series,
                   make_windows, split_series, window_count)
from .dictlearn import (Dictionary, ShapeletSet, SIDLConfig, SparseCode,
                        dict_update, grid_search, learn_dictionary,
                        load_shapelets, rank_top_k, reconstruct_sample,
                        reconstruction_gradient, save_shapelets, shift_atom,
                        sidl_objective, sparse_code)
from .distance import (DistanceMatrix, build_distance_matrix,
                       sliding_distance_profile, sliding_min_distance, znorm,
                       znorm_ed)
from .forecast import (BaselineModel, ErrorVector, PredictionSet, fit_baseline,
                       load_external_predictions, per_window_mse, predict,
                       write_predictions_csv)
from .pipeline import (AblationResult, PipelineError, PredictionSource,
                       RunConfig, RunReport, emit_report, run_ablation,
                       run_pipeline)
from .report import (average_reduction, crosscheck_run_dir, over_random_margin,
                     reduction_percent)
from .selection import (EvaluationReport, Selection, ThresholdSpec,
                        compute_threshold, discard, filter_high_error,
                        random_selection, selective_mse)
from .synth import (PlantedSeries, SynthSpec, bump_motif, burst_overlap_mask,
                    generate_planted)

__version__ = "0.1.0"

__all__ = [
    "AblationResult", "BaselineModel", "Dictionary", "DistanceMatrix",
    "ErrorVector", "EvaluationReport", "PipelineError", "PlantedSeries",
    "PredictionSet", "PredictionSource", "RunConfig", "RunReport",
    "SIDLConfig", "Selection", "ShapeletSet", "SparseCode", "SplitSpec",
    "SynthSpec", "ThresholdSpec", "TimeSeries", "Window", "WindowSet",
    "average_reduction", "build_distance_matrix", "bump_motif",
    "burst_overlap_mask", "compute_threshold", "crosscheck_run_dir",
    "dict_update", "discard", "emit_report", "filter_high_error",
    "fit_baseline", "generate_planted", "grid_search", "learn_dictionary",
    "load_external_predictions", "load_series", "load_shapelets",
    "make_windows", "over_random_margin", "per_window_mse", "predict",
    "random_selection", "rank_top_k", "reconstruct_sample",
    "reconstruction_gradient", "reduction_percent", "run_ablation",
    "run_pipeline", "save_shapelets", "selective_mse", "shift_atom",
    "sidl_objective", "sliding_distance_profile", "sliding_min_distance",
    "sparse_code", "split_series", "window_count", "write_predictions_csv",
    "znorm", "znorm_ed",
]

"""Data-quality indicators from pairwise input/output distance statistics.

The package measures how non-linear the relationship between a dataset's
declared input and output spaces is, globally and over growing k-NN
neighborhoods of every point, and turns the local values into a
histogram-over-k heatmap plus a set of trajectory detectors (homogeneous
clusters, out-of-distribution points, classification outliers, simple
subsets) with an inverse map from heatmap regions back to data points.
"""

from .analysis import (DetectionReport, DetectorConfig, detect_homogeneous,
                       detect_ood, detect_outliers, detect_simple_subsets,
                       global_qi2r, homogeneous_cluster_counts,
                       qi2r_distribution, select_region)
from .core import (Mlqi2Matrix, PairSums, Shlqi2Grid, Stabilizers,
                   compute_mlqi2, compute_shlqi2, compute_stabilizers,
                   default_bin_width, qi2r_direct, qi2r_from_sums,
                   update_sums_add_point)
from .dataset import (Dataset, Embedding2D, load_csv, load_embedding,
                      load_idx_mnist, save_csv)
from .errors import ConfigError, DataError, Qi2Error
from .export import (ResultContainer, export_report_csv, load_results,
                     render_heatmap, save_results)
from .knn import (NeighborIndex, build_index, build_index_from_matrix,
                  load_index, neighborhood, save_index)
from .metrics import MetricSpec, distance, distance_row

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DataError", "Dataset", "DetectionReport", "DetectorConfig",
    "Embedding2D", "MetricSpec", "Mlqi2Matrix", "NeighborIndex", "PairSums",
    "Qi2Error", "ResultContainer", "Shlqi2Grid", "Stabilizers",
    "build_index", "build_index_from_matrix", "compute_mlqi2", "compute_shlqi2",
    "compute_stabilizers", "default_bin_width", "detect_homogeneous",
    "detect_ood", "detect_outliers", "detect_simple_subsets", "distance",
    "distance_row", "export_report_csv", "global_qi2r",
    "homogeneous_cluster_counts", "load_csv", "load_embedding",
    "load_idx_mnist", "load_index", "load_results", "neighborhood",
    "qi2r_direct", "qi2r_distribution", "qi2r_from_sums", "render_heatmap",
    "save_csv", "save_index", "save_results", "select_region",
    "update_sums_add_point",
]

"""Coverage-boundary detection with randomized shallow networks."""

from .classifier import MultiClassModel, accuracy, fit_one_vs_all, predict_multiclass, train_binary
from .ddrf import ddrf_pipeline, score_pool, select_from_pool, select_top
from .features import FeatureSet, approximate_kernel, sample_features, sample_orf_features, transform
from .kernel_baseline import gram_matrix, train_kernel_logistic
from .scenario import Dataset, ScenarioConfig, generate_scenario, sigma_heuristic

__version__ = "0.1.0"

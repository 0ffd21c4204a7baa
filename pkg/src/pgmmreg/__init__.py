"""Kernel ridge regression with min-max kernels, and Lp-boosted regression trees."""

from .boosting import (
    BoostModel,
    early_stop_threshold,
    fit_lp_boost,
    lp_grad,
    lp_hess,
    lp_loss,
    predict_boost,
)
from .data import (
    DataError,
    Dataset,
    ScalingParams,
    apply_scaling,
    fit_scaling,
    load_csv,
    split,
)
from .kernels import KernelSpec, gmm, kernel_matrix, pgmm, rbf, transform_nonnegative
from .ridge import (
    KernelRidgeModel,
    LinearRidgeModel,
    NotPositiveDefinite,
    fit_kernel_ridge,
    fit_linear_ridge,
    predict_kernel_ridge,
    predict_linear,
    solve_spd,
)
from .trees import (
    Binner,
    RegressionTree,
    apply_bins,
    build_bins,
    gain_first_order,
    gain_second_order,
    grow_tree,
    predict_tree,
)

__version__ = "0.1.0"

"""Outlier-robust Wasserstein-1 estimation via median-of-means critics.

The heavy lifting lives in the C++ extension; this package re-exports it.
"""

from ._core import (  # noqa: F401
    ContaminationSpec,
    CriticNet,
    DivergenceError,
    GanConfig,
    Generator,
    GeneratorScores,
    InlierSpec,
    PairScheme,
    RunReport,
    Sample,
    ToyDataset,
    TracePoint,
    TrainConfig,
    clip_weights,
    combined_tau_tilde,
    exact_w1,
    exact_w1_dual_check,
    generate_sample,
    iters_for_epochs,
    lipschitz_bound,
    make_toy_x,
    make_toy_y,
    median_index,
    median_value,
    mom_estimate,
    mom_from_values,
    mou_estimate,
    partition_blocks,
    read_sample_csv,
    recommended_k,
    score_generator,
    train_momwgan,
    train_w_mom,
    train_w_mou,
    train_w_mou_diag,
    true_w1_reference,
    write_sample_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

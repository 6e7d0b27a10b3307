from .dice import dice_counts, per_slice_dice, volumetric_dice
from .properties import TumorProperties, tumor_properties
from .regression import RegressionFit, ols_fit
from .summary import (
    CSV_COLUMNS,
    WIN_PRIORITY,
    EvalRecord,
    StrategySummary,
    histogram,
    quartiles,
    summarize_strategy,
    win_counts,
)

__all__ = [
    "CSV_COLUMNS",
    "EvalRecord",
    "RegressionFit",
    "StrategySummary",
    "TumorProperties",
    "WIN_PRIORITY",
    "dice_counts",
    "histogram",
    "ols_fit",
    "per_slice_dice",
    "quartiles",
    "summarize_strategy",
    "tumor_properties",
    "volumetric_dice",
    "win_counts",
]

"""Per-strategy score summaries, histograms, and best-strategy counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..propagation import ALL_STRATEGIES, Strategy

# Tie-break priority when a patient's best Dice is shared between strategies.
WIN_PRIORITY = (Strategy.CENTER_OUTWARD, Strategy.BOTTOM_TO_TOP, Strategy.TOP_TO_BOTTOM)


@dataclass(frozen=True)
class EvalRecord:
    """One patient x strategy evaluation row."""

    patient_id: str
    strategy: Strategy
    prompt_kind: str  # "box" | "mask"
    dice: float
    n_tumor_slices: int
    tumor_volume_voxels: int
    initial_area_voxels: int
    lesion_count: int

    def __post_init__(self):
        if not 0.0 <= self.dice <= 1.0:
            raise ValueError(f"dice {self.dice} outside [0, 1]")
        if self.prompt_kind not in ("box", "mask"):
            raise ValueError(f"unknown prompt kind {self.prompt_kind!r}")

    def to_json(self) -> dict:
        return {
            "patient_id": self.patient_id,
            "strategy": self.strategy.value,
            "prompt_kind": self.prompt_kind,
            "dice": self.dice,
            "n_tumor_slices": self.n_tumor_slices,
            "tumor_volume_voxels": self.tumor_volume_voxels,
            "initial_area_voxels": self.initial_area_voxels,
            "lesion_count": self.lesion_count,
        }


CSV_COLUMNS = (
    "patient_id",
    "strategy",
    "prompt_kind",
    "dice",
    "n_tumor_slices",
    "tumor_volume_voxels",
    "initial_area_voxels",
    "lesion_count",
)


@dataclass(frozen=True)
class StrategySummary:
    strategy: Strategy
    count: int
    mean: float
    median: float
    q1: float
    q3: float
    min: float
    max: float
    win_count: int
    tie_count: int  # patients whose shared best score included this strategy

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "median": self.median,
            "q1": self.q1,
            "q3": self.q3,
            "min": self.min,
            "max": self.max,
            "win_count": self.win_count,
            "tie_count": self.tie_count,
        }


def win_counts(
    by_patient: dict[str, dict[Strategy, float]],
    strategies: tuple[Strategy, ...] = ALL_STRATEGIES,
) -> tuple[dict[Strategy, int], dict[Strategy, int]]:
    """Count, per strategy, the patients it scored best on.

    Exact ties are broken by WIN_PRIORITY so wins always sum to the patient
    count; every strategy participating in a tie gets a tie_count credit.
    """
    wins = {s: 0 for s in strategies}
    ties = {s: 0 for s in strategies}
    for patient_id, scores in by_patient.items():
        missing = [s for s in strategies if s not in scores]
        if missing:
            raise ValueError(f"patient {patient_id!r} missing strategies {missing}")
        best = max(scores[s] for s in strategies)
        tied = [s for s in strategies if scores[s] == best]
        if len(tied) > 1:
            for s in tied:
                ties[s] += 1
        winner = next(s for s in WIN_PRIORITY if s in tied)
        wins[winner] += 1
    return wins, ties


def quartiles(scores: list[float]) -> tuple[float, float, float]:
    """(q1, median, q3) by linear interpolation between order statistics."""
    if not scores:
        raise ValueError("empty score list")
    arr = np.asarray(scores, dtype=np.float64)
    q1, med, q3 = np.percentile(arr, [25.0, 50.0, 75.0], method="linear")
    return float(q1), float(med), float(q3)


def histogram(scores: list[float], bin_width: float = 0.05) -> list[int]:
    """Counts over bins [i*w, (i+1)*w), the final bin closed at 1.0."""
    n_bins = round(1.0 / bin_width)
    if abs(n_bins * bin_width - 1.0) > 1e-9 or n_bins < 1:
        raise ValueError(f"bin width {bin_width} does not divide 1 evenly")
    counts = [0] * n_bins
    for s in scores:
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"score {s} outside [0, 1]")
        idx = min(int(s / bin_width), n_bins - 1)
        counts[idx] += 1
    return counts


def summarize_strategy(
    strategy: Strategy,
    scores: list[float],
    win_count: int,
    tie_count: int,
) -> StrategySummary:
    if not scores:
        raise ValueError(f"no scores for strategy {strategy.value}")
    q1, med, q3 = quartiles(scores)
    return StrategySummary(
        strategy=strategy,
        count=len(scores),
        mean=float(np.mean(scores)),
        median=med,
        q1=q1,
        q3=q3,
        min=min(scores),
        max=max(scores),
        win_count=win_count,
        tie_count=tie_count,
    )

"""Report assembly and serialization.

The JSON layout is fixed and construction is fully deterministic, so two
identical runs produce byte-identical files. Regression fits are null when
the data is degenerate (fewer than two points, or every Dice identical).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from ..metrics import (
    CSV_COLUMNS,
    EvalRecord,
    histogram,
    ols_fit,
    summarize_strategy,
    win_counts,
)
from ..propagation import ALL_STRATEGIES
from .evaluate import EvalOutcome

# Report fit targets: property plotted against Dice, as in the failure
# correlate analysis (x = dice, y = property).
FIT_TARGETS = (
    ("n_slices", "n_tumor_slices"),
    ("volume", "tumor_volume_voxels"),
    ("initial_area", "initial_area_voxels"),
)


def build_report(outcome: EvalOutcome, bin_width: float = 0.05) -> dict:
    records = outcome.records
    by_patient: dict[str, dict] = {}
    for rec in records:
        by_patient.setdefault(rec.patient_id, {})[rec.strategy] = rec.dice

    summaries: dict[str, dict] = {}
    histograms: dict[str, list[int]] = {}
    if records:
        present = tuple(s for s in ALL_STRATEGIES if any(r.strategy is s for r in records))
        wins, ties = win_counts(by_patient, present)
        for strategy in present:
            scores = [r.dice for r in records if r.strategy is strategy]
            summaries[strategy.value] = summarize_strategy(
                strategy, scores, wins[strategy], ties[strategy]
            ).to_json()
            histograms[strategy.value] = histogram(scores, bin_width)

    fits: dict[str, dict | None] = {}
    for name, attr in FIT_TARGETS:
        points = [(r.dice, float(getattr(r, attr))) for r in records]
        try:
            fits[name] = ols_fit(points).to_json()
        except ValueError:
            fits[name] = None

    return {
        "records": [r.to_json() for r in records],
        "summaries": summaries,
        "fits": fits,
        "histograms": {"bin_width": bin_width, "counts": histograms},
        "errors": [{"patient_id": e.patient_id, "message": e.message} for e in outcome.errors],
    }


def write_report_json(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, indent=2) + "\n")


def write_records_csv(records: list[EvalRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            row = rec.to_json()
            writer.writerow([row[col] for col in CSV_COLUMNS])

"""
Report Writers

CV reports become a TSV (one row per fold plus "mean" and "pooled" summary
rows) and a JSON document; sweep and ablation tables become TSV plus a
plot-data CSV. Output contains no timestamps, so identical runs write
identical bytes.
"""

import json
from pathlib import Path
from typing import Optional

import pandas as pd
import structlog

from src.evaluation.cross_validation import CvReport
from src.evaluation.experiments import TTestResult

logger = structlog.get_logger(__name__)

FLOAT_FORMAT = "%.6f"

CV_COLUMNS = [
    "fold", "tp", "fp", "fn", "tn", "precision", "recall", "f1",
    "alpha", "alpha2", "k", "k2", "validation_f1", "train_size", "test_size",
]


def cv_report_frame(report: CvReport) -> pd.DataFrame:
    """Per-fold rows followed by the mean-of-folds and pooled-count rows."""
    rows = []
    for f in report.folds:
        rows.append(
            {
                "fold": str(f.fold),
                **{k: v for k, v in f.metrics.to_dict().items()},
                **f.chosen.to_dict(),
                "validation_f1": f.validation_f1,
                "train_size": f.train_size,
                "test_size": f.test_size,
            }
        )
    rows.append(
        {
            "fold": "mean",
            "precision": report.mean_precision,
            "recall": report.mean_recall,
            "f1": report.mean_f1,
        }
    )
    rows.append({"fold": "pooled", **report.pooled.to_dict()})
    frame = pd.DataFrame(rows, columns=CV_COLUMNS)
    for column in ("tp", "fp", "fn", "tn", "k", "k2", "train_size", "test_size"):
        frame[column] = frame[column].astype("Int64")
    return frame


def cv_report_dict(report: CvReport, tests: Optional[dict[str, TTestResult]] = None) -> dict:
    data = {
        "name": report.name,
        "plan_hash": report.plan_hash,
        "seed": report.seed,
        "config": report.config.model_dump(),
        "folds": [
            {
                "fold": f.fold,
                **f.metrics.to_dict(),
                "chosen": f.chosen.to_dict(),
                "validation_f1": f.validation_f1,
                "train_size": f.train_size,
                "test_size": f.test_size,
            }
            for f in report.folds
        ],
        "mean": {
            "precision": report.mean_precision,
            "recall": report.mean_recall,
            "f1": report.mean_f1,
        },
        "pooled": report.pooled.to_dict(),
    }
    if tests:
        data["paired_t_test"] = {
            name: {"statistic": t.statistic, "p_value": t.p_value, "significant": t.significant}
            for name, t in sorted(tests.items())
        }
    return data


def _json_safe(value):
    if isinstance(value, float) and value != value:
        return None
    if isinstance(value, float) and value in (float("inf"), float("-inf")):
        return str(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_json_safe(v) for v in value]
    return value


def write_json(data: dict, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(_json_safe(data), sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return path


def write_table(frame: pd.DataFrame, path: Path, sep: str = "\t") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, sep=sep, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_cv_report(
    report: CvReport,
    out_dir: Path,
    stem: Optional[str] = None,
    tests: Optional[dict[str, TTestResult]] = None,
) -> list[Path]:
    """Write `<stem>.tsv` and `<stem>.json`; returns both paths."""
    stem = stem or report.name
    out_dir = Path(out_dir)
    paths = [
        write_table(cv_report_frame(report), out_dir / f"{stem}.tsv"),
        write_json(cv_report_dict(report, tests), out_dir / f"{stem}.json"),
    ]
    logger.info("report_written", method=report.name, paths=[str(p) for p in paths])
    return paths


def plot_frame(frame: pd.DataFrame, x: str, method: Optional[str] = None) -> pd.DataFrame:
    """
    Plot data: one row per x value, P/R/F1 columns per method.

    With `method` given, columns are named '<method>_<metric>'.
    """
    metrics = ["precision", "recall", "f1"]
    if method is None:
        out = frame[[x] + metrics].copy()
        return out.rename(columns={m: f"wespad_{m}" for m in metrics})
    wide = frame.pivot(index=x, columns=method, values=metrics)
    wide.columns = [f"{name}_{metric}" for metric, name in wide.columns]
    wide = wide[sorted(wide.columns)]
    return wide.reset_index()


def write_sweep(frame: pd.DataFrame, out_dir: Path, stem: str, x: str, method: Optional[str] = None) -> list[Path]:
    """Write the sweep table as TSV and its plot data as CSV."""
    out_dir = Path(out_dir)
    paths = [
        write_table(frame, out_dir / f"{stem}.tsv"),
        write_table(plot_frame(frame, x, method), out_dir / f"{stem}_plot.csv", sep=","),
    ]
    logger.info("report_written", table=stem, paths=[str(p) for p in paths])
    return paths


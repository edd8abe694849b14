"""
Unit tests for report writers
"""

import json

import pandas as pd
import pytest

from src.evaluation.cross_validation import CvReport, FoldResult, GridPoint
from src.evaluation.experiments import TTestResult
from src.evaluation.metrics import Metrics
from src.evaluation.reports import (
    cv_report_dict,
    cv_report_frame,
    plot_frame,
    write_cv_report,
    write_json,
    write_sweep,
    write_table,
)
from src.wespad.config import WespadConfig


@pytest.fixture
def report():
    folds = (
        FoldResult(0, Metrics(3, 1, 1, 5), GridPoint(0.05, 0.05, 3, 3), 0.7, 20, 10, (("a", "pos", 0.9),)),
        FoldResult(1, Metrics(2, 2, 0, 6), GridPoint(0.3, 0.3, 4, 4), 0.6, 20, 10, (("b", "neg", 0.1),)),
    )
    return CvReport(name="wespad", folds=folds, plan_hash="abc123", seed=7, config=WespadConfig())


class TestCvReport:
    """Test CV report rendering."""

    def test_frame_rows(self, report):
        frame = cv_report_frame(report)

        assert frame["fold"].tolist() == ["0", "1", "mean", "pooled"]
        assert frame.loc[2, "f1"] == pytest.approx(report.mean_f1)
        assert frame.loc[3, "tp"] == 5
        assert frame.loc[0, "k"] == 3
        assert pd.isna(frame.loc[2, "tp"])

    def test_dict(self, report):
        data = cv_report_dict(report, {"me_lex": TTestResult(2.5, 0.03, True)})

        assert data["plan_hash"] == "abc123"
        assert data["folds"][1]["chosen"] == {"alpha": 0.3, "alpha2": 0.3, "k": 4, "k2": 4}
        assert data["pooled"]["fn"] == 1
        assert data["paired_t_test"]["me_lex"]["significant"] is True

    def test_write_cv_report(self, tmp_path, report):
        tsv, js = write_cv_report(report, tmp_path)

        assert tsv.name == "wespad.tsv"
        header = tsv.read_text().splitlines()[0].split("\t")
        assert header[:8] == ["fold", "tp", "fp", "fn", "tn", "precision", "recall", "f1"]
        assert json.loads(js.read_text())["name"] == "wespad"

    def test_identical_reports_identical_bytes(self, tmp_path, report):
        a = write_cv_report(report, tmp_path / "a")
        b = write_cv_report(report, tmp_path / "b")

        assert [p.read_bytes() for p in a] == [p.read_bytes() for p in b]


class TestWriters:
    """Test table, JSON and sweep writers."""

    def test_json_infinite_statistic(self, tmp_path):
        path = write_json({"t": float("inf"), "p": float("nan")}, tmp_path / "x.json")

        assert json.loads(path.read_text()) == {"p": None, "t": "inf"}

    def test_table_float_format(self, tmp_path):
        path = write_table(pd.DataFrame({"x": [1], "f1": [1 / 3]}), tmp_path / "t.tsv")

        assert path.read_text() == "x\tf1\n1\t0.333333\n"

    def test_plot_frame_single_method(self):
        frame = pd.DataFrame({"k": [1, 2], "precision": [0.1, 0.2], "recall": [0.3, 0.4], "f1": [0.5, 0.6]})

        plot = plot_frame(frame, "k")

        assert list(plot.columns) == ["k", "wespad_precision", "wespad_recall", "wespad_f1"]

    def test_plot_frame_per_method(self):
        frame = pd.DataFrame(
            {
                "fraction": [0.5, 0.5, 1.0, 1.0],
                "baseline": ["me_lex", "wespad", "me_lex", "wespad"],
                "precision": [0.1, 0.2, 0.3, 0.4],
                "recall": [0.1, 0.2, 0.3, 0.4],
                "f1": [0.1, 0.2, 0.3, 0.4],
            }
        )

        plot = plot_frame(frame, "fraction", "baseline")

        assert plot["fraction"].tolist() == [0.5, 1.0]
        assert plot["wespad_f1"].tolist() == [0.2, 0.4]
        assert plot["me_lex_f1"].tolist() == [0.1, 0.3]

    def test_write_sweep(self, tmp_path):
        frame = pd.DataFrame({"k": [1], "precision": [0.1], "recall": [0.2], "f1": [0.3], "plan_hash": ["h"]})

        tsv, csv = write_sweep(frame, tmp_path, "sweep_k", x="k")

        assert tsv.name == "sweep_k.tsv"
        assert csv.read_text().splitlines()[0] == "k,wespad_precision,wespad_recall,wespad_f1"

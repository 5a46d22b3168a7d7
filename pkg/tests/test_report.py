"""Per-cell aggregates and the CSV reports"""
import math

import numpy as np
import pandas as pd
import pytest

from evaluation.report import (
    EPISODE_COLUMNS,
    SUMMARY_COLUMNS,
    aggregate,
    load_report,
    passing_time_savings,
    report,
    results_frame,
)
from evaluation.runner import EpisodeResult


def result(density=4, penetration=0.0, replication=0, passing_time=20.0, collided=False, timed_out=False,
           error=None):
    return EpisodeResult(density=density, penetration=penetration, replication=replication, seed=7,
                         passing_time=passing_time, collided=collided, timed_out=timed_out,
                         steps=0 if passing_time is None else int(passing_time / 0.5), error=error)


@pytest.fixture
def results():
    return [
        result(passing_time=10.0, replication=0),
        result(passing_time=12.0, replication=1),
        result(passing_time=14.0, replication=2),
        result(passing_time=None, collided=True, replication=3),
        result(penetration=1.0, passing_time=9.0, replication=0),
        result(penetration=1.0, passing_time=None, timed_out=True, replication=1),
        result(penetration=1.0, passing_time=None, replication=2, error="could not place vehicle"),
    ]


class TestAggregate:

    def test_cell_statistics(self, results):
        summary = aggregate(results)
        assert list(summary.columns) == SUMMARY_COLUMNS
        row = summary[summary["penetration"] == 0.0].iloc[0]
        assert row["mean_passing_time_s"] == pytest.approx(12.0)
        assert row["std_s"] == pytest.approx(2.0)
        assert row["sem_s"] == pytest.approx(2.0 / math.sqrt(3))
        assert row["n"] == 4
        assert row["collision_rate"] == pytest.approx(0.25)
        assert row["timeout_rate"] == 0.0

    def test_infeasible_episodes_excluded(self, results):
        row = aggregate(results).query("penetration == 1.0").iloc[0]
        assert row["n"] == 2
        assert row["timeout_rate"] == pytest.approx(0.5)
        assert row["mean_passing_time_s"] == pytest.approx(9.0)
        assert math.isnan(row["std_s"])

    def test_rates_are_fractions(self, results):
        summary = aggregate(results)
        for col in ("collision_rate", "timeout_rate"):
            assert summary[col].between(0.0, 1.0).all()

    def test_empty(self):
        summary = aggregate([])
        assert summary.empty
        assert list(summary.columns) == SUMMARY_COLUMNS

    def test_savings_against_all_hv_cell(self):
        summary = aggregate([
            result(passing_time=20.0), result(passing_time=20.0, replication=1),
            result(penetration=1.0, passing_time=15.0), result(penetration=1.0, passing_time=15.0, replication=1),
        ])
        savings = passing_time_savings(summary).set_index("penetration")["saving"]
        assert savings[0.0] == pytest.approx(0.0)
        assert savings[1.0] == pytest.approx(0.25)


class TestReportFiles:

    def test_round_trip(self, results, tmp_path):
        episodes_path, summary_path = report(results, str(tmp_path / "policy"), verbose=False)
        episodes = load_report(episodes_path)
        assert list(episodes.columns) == EPISODE_COLUMNS
        pd.testing.assert_series_equal(episodes["passing_time"], results_frame(results)["passing_time"])
        summary = load_report(summary_path)
        expected = aggregate(results)
        np.testing.assert_array_equal(summary["mean_passing_time_s"].to_numpy(),
                                      expected["mean_passing_time_s"].to_numpy())
        # the error row is still in the raw file
        assert episodes["error"].notna().sum() == 1

    def test_header_only_files(self, tmp_path):
        episodes_path, summary_path = report([], str(tmp_path), verbose=False)
        episodes, summary = load_report(episodes_path), load_report(summary_path)
        assert episodes.empty and summary.empty
        assert list(episodes.columns) == EPISODE_COLUMNS
        assert list(summary.columns) == SUMMARY_COLUMNS

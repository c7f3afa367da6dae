import json

import numpy as np
import pytest

from heatvqe.errors import SummaryError
from heatvqe.records import (
    ExperimentRecord,
    describe,
    fit_series,
    format_value,
    read_csv,
    summarize,
    write_csv,
    write_summary,
)


def _record(**extra):
    return ExperimentRecord("fig10", 3, 0.5, "ata", "depth", 4.0, 7, extra=extra)


class TestRecords:
    def test_row_merges_extra(self):
        row = _record(depth=4, fidelity=0.995).as_row(["n", "c", "depth", "fidelity", "seed"])
        assert row == {"n": 3, "c": 0.5, "depth": 4, "fidelity": 0.995, "seed": 7}

    def test_missing_column(self):
        with pytest.raises(KeyError):
            _record().as_row(["depth"])

    @pytest.mark.parametrize("value, text", [
        (True, "true"), (np.bool_(False), "false"), (0.1, "0.1"), (np.float64(1 / 3), repr(1 / 3)),
        (np.int64(5), "5"), (None, ""), ("ZZI", "ZZI"),
    ])
    def test_format_value(self, value, text):
        assert format_value(value) == text

    def test_csv(self, tmp_path):
        path = tmp_path / "rows.csv"
        records = [_record(depth=d, censored_flag=d > 4) for d in (2, 4, 8)]
        assert write_csv(str(path), records, ["n", "depth", "censored"]) == 3
        assert path.read_bytes().count(b"\r") == 0
        rows = read_csv(str(path))
        assert [r["depth"] for r in rows] == ["2", "4", "8"]
        assert rows[0]["censored"] == "false"

    def test_summary_json(self, tmp_path):
        path = tmp_path / "out.summary.json"
        write_summary(str(path), {"b": 1, "a": [1.5]})
        assert json.loads(path.read_text()) == {"a": [1.5], "b": 1}

    def test_describe_skips_missing(self):
        stats = describe([1.0, None, float("nan"), 3.0])
        assert stats["count"] == 2
        assert stats["mean"] == pytest.approx(2.0)
        assert describe([]) == {"count": 0}


class TestScaling:
    def test_exponential(self):
        xs = np.arange(2, 9)
        fit = fit_series(xs, 3.0 * 2.0 ** xs)
        assert fit.classification == "exponential"
        assert fit.slope_semilog == pytest.approx(np.log(2.0))
        assert fit.increasing and not fit.decreasing

    def test_polynomial(self):
        xs = np.arange(2, 9)
        fit = fit_series(xs, xs ** 2.0)
        assert fit.classification == "polynomial"
        assert fit.slope_loglog == pytest.approx(2.0)

    def test_too_few_points(self):
        with pytest.raises(SummaryError):
            fit_series([2, 3], [1, 2])

    def test_nonpositive(self):
        with pytest.raises(SummaryError):
            fit_series([2, 3, 4], [1, 0, 2])

    def test_groups_and_censoring(self):
        rows = [{"n": n, "c": c, "depth": d, "censored": cen} for n, c, d, cen in [
            (2, 0.5, 2, "false"), (3, 0.5, 4, "false"), (4, 0.5, 8, "false"), (5, 0.5, 64, "true"),
            (2, 2.0, 1, "false"), (3, 2.0, 2, "false"), (3, 2.0, 4, "false"), (4, 2.0, 3, "false"),
        ]]
        fits = {fit.group: fit for fit in summarize(rows)}
        assert fits["c=0.5"].points == 3
        assert fits["c=0.5"].censored == 1
        assert fits["c=2.0"].points == 3

    def test_default_y_column(self, tmp_path):
        path = tmp_path / "depth.csv"
        rows = [{"n": n, "c": 1.0, "depth": 2 ** n, "censored": False} for n in range(2, 7)]
        write_csv(str(path), rows, ["n", "c", "depth", "censored"])
        (fit,) = summarize(str(path))
        assert fit.classification == "exponential"

    def test_all_censored(self):
        rows = [{"n": n, "c": 1.0, "depth": 16, "censored": True} for n in (2, 3, 4)]
        with pytest.raises(SummaryError):
            summarize(rows)

    def test_missing_column(self):
        with pytest.raises(SummaryError):
            summarize([{"n": 2, "loss": 0.1}], y="depth")

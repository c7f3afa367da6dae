"""
Experiment records, campaign CSV files and scaling summaries.

A campaign emits one ExperimentRecord per row. Rows are written with a fixed
column order and repr() floats, so the same (config, seed) always yields the
same bytes. Wall time lives in the JSON sidecar, never in the CSV.
"""

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import scipy.stats

from .errors import SummaryError

logger = logging.getLogger("HeatVQE.Records")

RECORD_FIELDS = ("experiment", "n", "c", "method", "metric", "value", "seed", "mode", "shots", "censored")
Y_CANDIDATES = ("M_star", "depth", "value")
_TRUE = {"1", "true", "yes"}


@dataclass
class ExperimentRecord:
    experiment: str
    n: int
    c: float
    method: str
    metric: str
    value: float
    seed: int
    mode: str = "exact"
    shots: int = 0
    censored: bool = False
    extra: Dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    def as_row(self, columns: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        row = {name: getattr(self, name) for name in RECORD_FIELDS}
        row.update(self.extra)
        if columns is None:
            return row
        missing = [c for c in columns if c not in row]
        if missing:
            raise KeyError(f"record {self.experiment} has no column(s) {missing}")
        return {c: row[c] for c in columns}

    def to_dict(self) -> dict:
        return asdict(self)


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return str(value)


def write_csv(path: str, records: Iterable[Union[ExperimentRecord, dict]], columns: Sequence[str]) -> int:
    """Write records in the given column order; returns the row count."""
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for record in records:
            row = record.as_row(columns) if isinstance(record, ExperimentRecord) else record
            writer.writerow([format_value(row[c]) for c in columns])
            count += 1
    logger.debug(f"[Records] Wrote {count} rows to {path}")
    return count


def read_csv(path: str) -> List[Dict[str, str]]:
    with open(path, "r", newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def describe(values: Sequence[float]) -> dict:
    values = np.asarray([v for v in values if v is not None and not math.isnan(v)], dtype=float)
    if values.size == 0:
        return {"count": 0}
    return {
        "count": int(values.size),
        "mean": float(values.mean()),
        "std": float(values.std()),
        "min": float(values.min()),
        "max": float(values.max()),
    }


def write_summary(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


@dataclass
class ScalingFit:
    """Power-law and exponential fits of one series y(x)."""

    group: str
    points: int
    censored: int
    slope_loglog: float
    intercept_loglog: float
    residual_loglog: float
    slope_semilog: float
    intercept_semilog: float
    residual_semilog: float
    classification: str
    increasing: bool
    decreasing: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _is_censored(row: dict, column: str) -> bool:
    value = row.get(column, False)
    if isinstance(value, str):
        return value.strip().lower() in _TRUE
    return bool(value)


def _rms(residuals: np.ndarray) -> float:
    return float(np.sqrt(np.mean(residuals ** 2)))


def fit_series(xs: Sequence[float], ys: Sequence[float], group: str = "", censored: int = 0) -> ScalingFit:
    """
    Fit log y against log x and against x.

    The series is called exponential only when the semi-log fit has a
    strictly smaller residual; equal residuals count as polynomial.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 3:
        raise SummaryError(f"series {group or '(all)'} has {x.size} uncensored points, need >= 3")
    if np.any(x <= 0) or np.any(y <= 0):
        raise SummaryError(f"series {group or '(all)'} has nonpositive values; log fits need positive data")
    log_y = np.log(y)
    poly = scipy.stats.linregress(np.log(x), log_y)
    expo = scipy.stats.linregress(x, log_y)
    res_poly = _rms(log_y - (poly.intercept + poly.slope * np.log(x)))
    res_expo = _rms(log_y - (expo.intercept + expo.slope * x))
    order = np.argsort(x)
    steps = np.diff(y[order])
    return ScalingFit(
        group=group,
        points=int(x.size),
        censored=censored,
        slope_loglog=float(poly.slope),
        intercept_loglog=float(poly.intercept),
        residual_loglog=res_poly,
        slope_semilog=float(expo.slope),
        intercept_semilog=float(expo.intercept),
        residual_semilog=res_expo,
        classification="exponential" if res_expo < res_poly - 1e-12 else "polynomial",
        increasing=bool(np.all(steps >= 0)),
        decreasing=bool(np.all(steps <= 0)),
    )


def summarize(source: Union[str, List[dict]], x: str = "n", y: Optional[str] = None,
              group_by: Optional[str] = "c", censored_column: str = "censored", logger=None) -> List[ScalingFit]:
    """
    Scaling fits per group of a campaign CSV (or of its rows).

    Censored rows are dropped from the fit; rows sharing an x are averaged.
    A group with only censored rows is an error.
    """
    log = logger or logging.getLogger("HeatVQE.Records")
    rows = read_csv(source) if isinstance(source, str) else list(source)
    if not rows:
        raise SummaryError("nothing to summarize")
    if y is None:
        y = next((name for name in Y_CANDIDATES if name in rows[0]), None)
        if y is None:
            raise SummaryError(f"no y column given and none of {Y_CANDIDATES} present")
    for name in (x, y):
        if name not in rows[0]:
            raise SummaryError(f"column {name!r} not in the data")

    groups: Dict[str, List[dict]] = {}
    for row in rows:
        key = str(row[group_by]) if group_by and group_by in row else ""
        groups.setdefault(key, []).append(row)

    fits = []
    for key, members in groups.items():
        kept = [r for r in members if not _is_censored(r, censored_column)]
        censored = len(members) - len(kept)
        if not kept:
            raise SummaryError(f"series {group_by}={key} is censored at every point")
        by_x: Dict[float, List[float]] = {}
        for r in kept:
            by_x.setdefault(float(r[x]), []).append(float(r[y]))
        xs = sorted(by_x)
        ys = [float(np.mean(by_x[v])) for v in xs]
        fit = fit_series(xs, ys, f"{group_by}={key}" if key else "", censored)
        log.info(
            f"[Records] {fit.group or 'series'}: slope(log-log)={fit.slope_loglog:.3f} "
            f"slope(semi-log)={fit.slope_semilog:.3f} -> {fit.classification}"
        )
        fits.append(fit)
    return fits

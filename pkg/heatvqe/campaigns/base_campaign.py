"""
Base campaign for HeatVQE figure reproductions.

Every campaign must extend BaseCampaign. The loader discovers and registers
subclasses from *_campaign.py files in this package.

Campaign interface:
- CAMPAIGN_NAME: str - Unique name used on the command line
- CAMPAIGN_PRIORITY: int - Listing order, highest first
- COLUMNS: tuple - CSV header, in order
- DEFAULTS: dict - CampaignConfig fields filled when left unset
- plan(config) -> list of task dicts, in row-key order
- run_task(config, task, rng, logger) -> list of ExperimentRecord
- rows_per_task(config, task) -> int - used to validate the merged row count
"""

import logging
import os
import time
from abc import ABC
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..config import CampaignConfig, make_rng, stream_id
from ..errors import ConfigError, HeatVQEError
from ..records import ExperimentRecord, describe, write_csv, write_summary


@dataclass
class CampaignResult:
    name: str
    config: CampaignConfig
    records: List[ExperimentRecord]
    csv_path: Optional[str]
    summary_path: Optional[str]
    summary: dict = field(default_factory=dict)
    wall_time: float = 0.0


def summary_path_for(csv_path: str) -> str:
    return os.path.splitext(csv_path)[0] + ".summary.json"


class BaseCampaign(ABC):
    """
    Abstract base class for campaigns.

    run() fills defaults, validates, fans the planned tasks out over a
    thread pool, merges the results in plan order and writes the CSV plus
    a JSON summary sidecar.
    """

    CAMPAIGN_NAME: str = "base"
    CAMPAIGN_PRIORITY: int = 0
    DESCRIPTION: str = ""
    COLUMNS: tuple = ()
    DEFAULTS: dict = {}
    NEEDS_POSITIVE_C: bool = True

    @classmethod
    def plan(cls, config: CampaignConfig) -> List[dict]:
        raise NotImplementedError(f"campaign {cls.CAMPAIGN_NAME} does not implement plan()")

    @classmethod
    def run_task(cls, config: CampaignConfig, task: dict, rng: np.random.Generator, logger) -> List[ExperimentRecord]:
        raise NotImplementedError(f"campaign {cls.CAMPAIGN_NAME} does not implement run_task()")

    @classmethod
    def rows_per_task(cls, config: CampaignConfig, task: dict) -> int:
        return 1

    @classmethod
    def task_rng(cls, config: CampaignConfig, *key: int) -> np.random.Generator:
        return make_rng(config.seed, stream_id(cls.CAMPAIGN_NAME), *key)

    @classmethod
    def summarize(cls, config: CampaignConfig, records: List[ExperimentRecord], logger) -> dict:
        """Means and spreads of the record values; campaigns add their own keys."""
        return {"value": describe([r.value for r in records])}

    @classmethod
    def prepare(cls, config: CampaignConfig) -> CampaignConfig:
        if config.figure not in (None, cls.CAMPAIGN_NAME):
            raise ConfigError(f"config is for {config.figure!r}, not {cls.CAMPAIGN_NAME!r}")
        config = config.with_defaults(cls.DEFAULTS)
        config.figure = cls.CAMPAIGN_NAME
        if config.out is None:
            config.out = f"{cls.CAMPAIGN_NAME}.csv"
        return config.validate(cls.NEEDS_POSITIVE_C)

    @classmethod
    def run(cls, config: CampaignConfig, logger=None, write: bool = True) -> CampaignResult:
        log = logger or logging.getLogger("HeatVQE.Campaigns")
        config = cls.prepare(config)
        tasks = cls.plan(config)
        expected = sum(cls.rows_per_task(config, task) for task in tasks)
        log.info(f"[Campaigns] {cls.CAMPAIGN_NAME}: {len(tasks)} task(s), {expected} row(s), {config.workers} worker(s)")

        def work(index: int):
            task = tasks[index]
            rng = cls.task_rng(config, index)
            start = time.perf_counter()
            records = cls.run_task(config, task, rng, log)
            elapsed = time.perf_counter() - start
            for record in records:
                record.wall_time = elapsed / max(1, len(records))
            log.debug(f"[Campaigns] {cls.CAMPAIGN_NAME} task {index + 1}/{len(tasks)} done in {elapsed:.2f}s")
            return records

        start = time.perf_counter()
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            batches = list(pool.map(work, range(len(tasks))))
        wall_time = time.perf_counter() - start

        records = [record for batch in batches for record in batch]
        if len(records) != expected:
            raise HeatVQEError(f"{cls.CAMPAIGN_NAME} produced {len(records)} rows, planned {expected}")

        summary = {
            "campaign": cls.CAMPAIGN_NAME,
            "seed": config.seed,
            "mode": config.mode,
            "shots": config.shots,
            "rows": len(records),
            "wall_time": wall_time,
        }
        summary.update(cls.summarize(config, records, log))

        csv_path = summary_path = None
        if write:
            csv_path = config.out
            write_csv(csv_path, records, cls.COLUMNS)
            summary_path = summary_path_for(csv_path)
            write_summary(summary_path, summary)
            log.info(f"[Campaigns] {cls.CAMPAIGN_NAME}: wrote {len(records)} rows to {csv_path} in {wall_time:.1f}s")
        return CampaignResult(cls.CAMPAIGN_NAME, config, records, csv_path, summary_path, summary, wall_time)

"""
Campaign loader for HeatVQE.

Campaigns are loaded from *_campaign.py files in this directory. Each file
defines a class extending BaseCampaign; the loader discovers and registers
them automatically.
"""

import importlib
import inspect
import logging
import os

from ..errors import ConfigError
from .base_campaign import BaseCampaign, CampaignResult, summary_path_for

logger = logging.getLogger("HeatVQE.Campaigns")

_campaigns = []
_loaded = False


def load_campaigns():
    """Import every *_campaign.py in this directory and register its campaigns."""
    global _campaigns, _loaded

    if _loaded:
        return _campaigns

    campaigns_dir = os.path.dirname(__file__)
    loaded_files = []
    for filename in sorted(os.listdir(campaigns_dir)):
        if not filename.endswith("_campaign.py") or filename == "base_campaign.py":
            continue

        full_module_name = f"{__name__}.{filename[:-3]}"
        try:
            module = importlib.import_module(full_module_name)

            for name, obj in inspect.getmembers(module, inspect.isclass):
                if obj is BaseCampaign or not issubclass(obj, BaseCampaign):
                    continue
                if obj.__module__ != module.__name__:
                    continue
                _campaigns.append({
                    "name": obj.CAMPAIGN_NAME,
                    "priority": obj.CAMPAIGN_PRIORITY,
                    "description": obj.DESCRIPTION,
                    "columns": obj.COLUMNS,
                    "class": obj,
                    "run": obj.run,
                })
            loaded_files.append(filename)

        except Exception as e:
            logger.error(f"[Campaigns] Failed to load {filename}: {e}")

    _campaigns.sort(key=lambda c: (-c["priority"], c["name"]))
    _loaded = True
    logger.debug(f"[Campaigns] Loaded {len(_campaigns)} campaign(s) from {len(loaded_files)} file(s)")
    return _campaigns


def get_campaigns():
    """Get all loaded campaigns, loading them if necessary."""
    if not _loaded:
        load_campaigns()
    return _campaigns


def get_campaign_by_name(name: str):
    """Get a campaign info dict by name, or None."""
    for campaign in get_campaigns():
        if campaign["name"] == name:
            return campaign
    return None


def get_all_campaign_names():
    """Get list of all loaded campaign names."""
    return [c["name"] for c in get_campaigns()]


def run_campaign(config, logger=None, write: bool = True) -> CampaignResult:
    """Run the campaign named by config.figure."""
    campaign = get_campaign_by_name(config.figure)
    if campaign is None:
        raise ConfigError(f"unknown campaign {config.figure!r}; available: {', '.join(get_all_campaign_names())}")
    return campaign["class"].run(config, logger=logger, write=write)

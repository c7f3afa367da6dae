"""
Solver handle loader for HeatVQE.

Solvers are loaded from *_solver.py files in this directory. Each file
defines one or more classes extending BaseSolver; the loader discovers and
registers them automatically.
"""

import importlib
import inspect
import logging
import os

from .base_solver import OPERATORS, BaseSolver

logger = logging.getLogger("HeatVQE.Solvers")

_solvers = []
_loaded = False


def _solver_info(obj) -> dict:
    return {
        "name": obj.SOLVER_NAME,
        "priority": obj.SOLVER_PRIORITY,
        "operator": obj.OPERATOR,
        "description": obj.DESCRIPTION,
        "class": obj,
        "solve": obj.solve,
    }


def load_solvers():
    """Import every *_solver.py in this directory and register its handles."""
    global _solvers, _loaded

    if _loaded:
        return _solvers

    solvers_dir = os.path.dirname(__file__)
    failed = []
    for filename in sorted(os.listdir(solvers_dir)):
        if not filename.endswith("_solver.py") or filename == "base_solver.py":
            continue

        full_module_name = f"{__name__}.{filename[:-3]}"
        try:
            module = importlib.import_module(full_module_name)

            for name, obj in inspect.getmembers(module, inspect.isclass):
                if obj is BaseSolver or not issubclass(obj, BaseSolver):
                    continue
                if obj.__module__ != module.__name__:
                    continue
                if obj.OPERATOR not in OPERATORS:
                    logger.error(f"[Solvers] {obj.SOLVER_NAME} declares unknown operator {obj.OPERATOR!r}, skipped")
                    continue
                _solvers.append(_solver_info(obj))
                logger.debug(f"[Solvers] Loaded solver: {obj.SOLVER_NAME} (priority {obj.SOLVER_PRIORITY})")

        except Exception as e:
            failed.append(filename)
            logger.error(f"[Solvers] Failed to load {filename}: {e}")

    _solvers.sort(key=lambda s: s["priority"], reverse=True)
    _loaded = True
    if failed:
        logger.error(f"[Solvers] Failed to load {len(failed)} solver file(s): {', '.join(failed)}")
    return _solvers


def get_solvers():
    """Get all loaded solvers, loading them if necessary."""
    if not _loaded:
        load_solvers()
    return _solvers


def get_solver_by_name(name: str):
    """Get a solver info dict by name, or None."""
    for solver in get_solvers():
        if solver["name"] == name:
            return solver
    return None


def get_solver_class(name: str):
    """Solver class by name; raises KeyError listing the known names."""
    solver = get_solver_by_name(name)
    if solver is None:
        raise KeyError(f"unknown solver {name!r}; available: {', '.join(get_all_solver_names())}")
    return solver["class"]


def get_all_solver_names():
    """Get list of all loaded solver names."""
    return [s["name"] for s in get_solvers()]

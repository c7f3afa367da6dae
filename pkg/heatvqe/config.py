"""
Configuration for HeatVQE.

Module-level constants hold the caps and defaults shared by every solver.
The dense-size cap can be overridden with the HEATVQE_CAP_QUBITS environment
variable. CampaignConfig carries everything a reproduction campaign needs and
validates itself before any compute starts.
"""

import dataclasses
import hashlib
import logging
import os
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import CapExceededError, ConfigError

logger = logging.getLogger("HeatVQE.Config")

CAP_ENV_VAR = "HEATVQE_CAP_QUBITS"
DEFAULT_CAP_QUBITS = 12
DEFAULT_LAYER_CAP = 64
PRUNE_THRESHOLD = 1e-12
OPTIMIZER_BUDGET = 1000
C_SAMPLE_RANGE = (0.1, 2.0)

MODES = ("exact", "shots")
ANSATZ_KINDS = ("hea", "cba", "daa")


def cap_qubits() -> int:
    """Dense-operator cap in qubits per side, honouring HEATVQE_CAP_QUBITS."""
    raw = os.environ.get(CAP_ENV_VAR)
    if not raw:
        return DEFAULT_CAP_QUBITS
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"[Config] Ignoring {CAP_ENV_VAR}={raw!r}: not an integer")
        return DEFAULT_CAP_QUBITS
    if value < 2:
        logger.warning(f"[Config] Ignoring {CAP_ENV_VAR}={raw!r}: must be >= 2")
        return DEFAULT_CAP_QUBITS
    return value


def check_cap(qubits: int, what: str = "operator") -> None:
    cap = cap_qubits()
    if qubits > cap:
        raise CapExceededError(qubits, cap, what)


def stream_id(name: str) -> int:
    """Stable 32-bit stream id for a name (campaign, solver, ...)."""
    return int(hashlib.md5(name.encode("utf-8")).hexdigest()[:8], 16)


def make_rng(seed: Optional[int], *stream: int) -> np.random.Generator:
    """
    Counter-based generator keyed by (seed, *stream).

    Every campaign row draws from its own Philox stream so results do not
    depend on worker scheduling.
    """
    entropy = [0 if seed is None else int(seed)] + [int(s) for s in stream]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def random_b(n_qubits: int, rng: np.random.Generator, real: bool = False,
             zero_mean: bool = False) -> np.ndarray:
    """Random normalized right-hand side (standard complex normal by default)."""
    size = 2 ** n_qubits
    b = rng.standard_normal(size)
    if not real:
        b = b + 1j * rng.standard_normal(size)
    if zero_mean:
        b = b - b.mean()
    return b / np.linalg.norm(b)


def sample_c_values(rng: np.random.Generator, count: int,
                    low: float = C_SAMPLE_RANGE[0], high: float = C_SAMPLE_RANGE[1]) -> np.ndarray:
    return rng.uniform(low, high, size=count)


@dataclass
class CampaignConfig:
    """Settings for one reproduction campaign. None means "campaign default"."""

    figure: str
    qubits: Optional[Tuple[int, ...]] = None
    c_values: Optional[Tuple[float, ...]] = None
    samples: Optional[int] = None
    c_samples: Optional[int] = None
    mode: str = "exact"
    shots: int = 0
    seed: int = 0
    workers: int = 1
    out: Optional[str] = None
    target: Optional[float] = None
    max_depth: Optional[int] = None
    layer_cap: int = DEFAULT_LAYER_CAP
    ansatz: Optional[str] = None
    p_values: Optional[Tuple[float, ...]] = None
    grid: Optional[int] = None
    steps: Optional[int] = None
    solvers: Optional[Tuple[str, ...]] = None
    eps_tilde: Optional[float] = None
    optimizer: str = "Nelder-Mead"
    budget: int = OPTIMIZER_BUDGET
    extra: dict = field(default_factory=dict)

    def with_defaults(self, defaults: dict) -> "CampaignConfig":
        """Fill every None field from a campaign's defaults."""
        updates = {
            key: value
            for key, value in defaults.items()
            if getattr(self, key, None) is None
        }
        return dataclasses.replace(self, **updates)

    def validate(self, needs_positive_c: bool = True) -> "CampaignConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "shots" and self.shots < 1:
            raise ConfigError("shots mode needs --shots >= 1")
        if self.seed is None or int(self.seed) < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.budget < 1:
            raise ConfigError("optimizer budget must be >= 1")
        if self.layer_cap < 0:
            raise ConfigError("layer cap must be >= 0")
        for name in ("samples", "c_samples", "grid", "steps", "max_depth"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError(f"{name} must be >= 1, got {value}")
        if self.grid is not None and self.grid < 2:
            raise ConfigError("grid must be >= 2")
        if self.target is not None and not 0.0 < self.target <= 1.0:
            raise ConfigError(f"target fidelity must be in (0, 1], got {self.target}")
        if self.ansatz is not None and self.ansatz.lower() not in ANSATZ_KINDS:
            raise ConfigError(f"ansatz must be one of {ANSATZ_KINDS}, got {self.ansatz!r}")
        for p in self.p_values or ():
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"noise level p must be in [0, 1], got {p}")
        for c in self.c_values or ():
            if c < 0 or (needs_positive_c and c == 0):
                bound = "> 0" if needs_positive_c else ">= 0"
                raise ConfigError(f"grid parameter c must be {bound}, got {c}")
        for n in self.qubits or ():
            if n < 2:
                raise ConfigError(f"qubit count must be >= 2, got {n}")
            check_cap(n, f"{self.figure} campaign")
        return self

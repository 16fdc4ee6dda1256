# config.py
"""Run configuration.

Defaults live in ``maxop/config/defaults.yaml`` (or the file named by
``MAXOP_DEFAULTS``).  Precedence, lowest first: defaults file, environment,
command-line flags, ``--config`` file.  ``MAXOP_THREADS`` caps parallelism.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

from .errors import ConfigError
from .funcmodel import from_dict

logger = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).parent / "config" / "defaults.yaml"
SUITES = (
    "all",
    "subharmonicity",
    "uniform",
    "tail",
    "lemma6",
    "prop5",
    "transfer",
    "continuity",
    "convex",
    "variation",
    "abs",
)
COMMANDS = ("kernel", "maximal", "verify", "continuity", "bruteforce")


def thread_cap() -> Optional[int]:
    """``MAXOP_THREADS`` clamped to [1, 64], or None when unset or invalid."""
    raw = os.getenv("MAXOP_THREADS")
    if raw is None:
        return None
    try:
        return max(1, min(64, int(raw)))
    except ValueError:
        logger.warning(f"Ignoring invalid MAXOP_THREADS={raw!r}")
        return None


def thread_count(default: int = 1) -> int:
    """Worker count from ``MAXOP_THREADS``, else ``default``."""
    cap = thread_cap()
    return cap if cap is not None else default


def _load_defaults() -> Dict[str, Any]:
    path = Path(os.getenv("MAXOP_DEFAULTS", str(DEFAULTS_PATH)))
    try:
        with open(path, "r", encoding="utf-8") as f:
            return dict(yaml.safe_load(f) or {})
    except FileNotFoundError:
        logger.warning(f"Defaults file not found: {path}")
        return {}


@dataclass
class RunConfig:
    command: str = "verify"
    kernel: str = "poisson"
    alpha: float = 0.5
    function: Optional[Dict[str, Any]] = None
    seed: int = 7
    corpus_size: int = 20
    grid_n: int = 256
    grid_span: Optional[float] = None
    tol: float = 1e-5
    delta: Optional[float] = None
    out_dir: str = "maxop-out"
    suite: str = "all"
    threads: int = 1
    db_url: Optional[str] = None
    tabulate_span: float = 10.0
    oracle_scales: int = 10_000
    oracle_corpus: bool = False
    oracle_points: int = 50
    indices: list = field(default_factory=lambda: [1, 2, 4, 8, 16, 32, 64])
    mode: str = "additive"
    verbose: bool = False

    @property
    def effective_delta(self) -> float:
        return self.delta if self.delta is not None else 10.0 * self.tol

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown subcommand {self.command!r}")
        if self.kernel not in ("poisson", "heat", "fracpoisson"):
            raise ConfigError("kernel", f"unknown kernel {self.kernel!r}")
        if self.kernel == "fracpoisson" and not 0.01 <= self.alpha <= 0.99:
            raise ConfigError("alpha", "must lie in [0.01, 0.99]")
        if self.grid_n < 16:
            raise ConfigError("grid_n", "must be >= 16")
        if not self.tol > 0:
            raise ConfigError("tol", "must be positive")
        if not self.effective_delta > self.tol:
            raise ConfigError("delta", "must exceed tol")
        if self.grid_span is not None and not self.grid_span > 0:
            raise ConfigError("grid_span", "must be positive")
        if self.suite not in SUITES:
            raise ConfigError("suite", f"must be one of {', '.join(SUITES)}")
        if self.corpus_size < 1:
            raise ConfigError("corpus_size", "must be >= 1")
        if self.oracle_points < 2:
            raise ConfigError("oracle_points", "must be >= 2")
        if self.mode not in ("additive", "translate", "jitter"):
            raise ConfigError("mode", "must be additive, translate or jitter")
        if not self.indices or any(int(j) < 1 for j in self.indices):
            raise ConfigError("indices", "must be positive integers")
        if self.function is not None:
            try:
                from_dict(self.function)
            except (AttributeError, TypeError, ValueError) as e:
                raise ConfigError("function", str(e)) from None
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _coerce(name: str, value: Any) -> Any:
    if name == "function" and isinstance(value, str):
        text = value.strip()
        if not text.startswith("{"):
            text = Path(text).read_text(encoding="utf-8")
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("function", f"invalid JSON: {e}") from None
    return value


def build_config(
    flags: Optional[Mapping[str, Any]] = None,
    config_path: Optional[str] = None,
) -> RunConfig:
    """Merge defaults, environment, flags and the optional config file."""
    known = {f.name for f in fields(RunConfig)}
    merged: Dict[str, Any] = {k: v for k, v in _load_defaults().items() if k in known}
    merged["threads"] = thread_count(int(merged.get("threads", 1)))

    for key, value in (flags or {}).items():
        if key in known and value is not None:
            merged[key] = value

    if config_path:
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                # YAML is a superset of the JSON config files we accept
                overrides = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError("config", f"cannot read {config_path}: {e}") from None
        for key, value in overrides.items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(key, "unknown configuration field")
            merged[key] = value

    cap = thread_cap()
    if cap is not None and merged.get("threads") is not None:
        # the environment caps flags and config files too
        try:
            merged["threads"] = min(int(merged["threads"]), cap)
        except (TypeError, ValueError):
            raise ConfigError("threads", f"not an integer: {merged['threads']!r}") from None

    try:
        cfg = RunConfig(**{k: _coerce(k, v) for k, v in merged.items()})
    except TypeError as e:
        raise ConfigError("config", str(e)) from None
    return cfg.validate()

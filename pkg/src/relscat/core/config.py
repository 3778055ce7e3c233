"""
Configuration management for relscat.

Experiment recipes are TOML files (JSON accepted as an alternate) holding a
grid block, a potential block, tolerances, logging settings and an
experiment-specific parameter table. Recipes are merged over defaults,
validated before any computation, and unknown keys are rejected with the
line number of the offending key.
"""

import copy
import hashlib
import json
import logging
import os
import re
import tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .error_handler import ConfigError

POTENTIAL_KINDS = ("gaussian-well", "bump", "yukawa-regularized", "tabulated")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class GridConfig:
    """Uniform centered grid with n points per axis on [-L, L)^3."""

    n: int = 64
    L: float = 16.0

    def validate(self) -> bool:
        return (
            isinstance(self.n, int)
            and self.n >= 16
            and self.n % 2 == 0
            and float(self.L) > 0
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GridConfig":
        return cls(n=int(data.get("n", 64)), L=float(data.get("L", 16.0)))

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "L": self.L}


@dataclass
class PotentialConfig:
    """
    Potential block of an experiment recipe.

    The analytic kinds use `a` as coupling; `width` for the Gaussian well,
    `mu` for the regularized Yukawa and `radius` for the compact bump.
    The tabulated kind reads the real part of a binary field file at `path`.
    """

    kind: str = "gaussian-well"
    a: float = 1.0
    width: float = 1.0
    mu: float = 1.0
    radius: float = 2.0
    sigma: float = 4.0
    path: Optional[str] = None

    def validate(self) -> bool:
        if self.kind not in POTENTIAL_KINDS:
            return False
        if self.width <= 0 or self.mu <= 0 or self.radius <= 0:
            return False
        if self.kind == "tabulated" and not self.path:
            return False
        return True

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PotentialConfig":
        path = data.get("path")
        return cls(
            kind=str(data.get("kind", "gaussian-well")),
            a=float(data.get("a", 1.0)),
            width=float(data.get("width", 1.0)),
            mu=float(data.get("mu", 1.0)),
            radius=float(data.get("radius", 2.0)),
            sigma=float(data.get("sigma", 4.0)),
            path=str(path) if path else None,
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "kind": self.kind,
            "a": self.a,
            "width": self.width,
            "mu": self.mu,
            "radius": self.radius,
            "sigma": self.sigma,
        }
        if self.path:
            data["path"] = self.path
        return data


@dataclass
class ToleranceConfig:
    """Numerical tolerances shared by the threshold and scattering modules."""

    tol_eig: float = 1e-6
    tol_inv: float = 1e-10
    v_cut_rel: float = 1e-7
    decay_cap: float = 1e3
    support_mass: float = 1e-8
    dense_limit: int = 8000

    def validate(self) -> bool:
        return (
            self.tol_eig > 0
            and self.tol_inv > 0
            and 0 < self.v_cut_rel < 1
            and self.decay_cap > 0
            and self.support_mass > 0
            and self.dense_limit > 0
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ToleranceConfig":
        return cls(
            tol_eig=float(data.get("tol_eig", 1e-6)),
            tol_inv=float(data.get("tol_inv", 1e-10)),
            v_cut_rel=float(data.get("v_cut_rel", 1e-7)),
            decay_cap=float(data.get("decay_cap", 1e3)),
            support_mass=float(data.get("support_mass", 1e-8)),
            dense_limit=int(data.get("dense_limit", 8000)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tol_eig": self.tol_eig,
            "tol_inv": self.tol_inv,
            "v_cut_rel": self.v_cut_rel,
            "decay_cap": self.decay_cap,
            "support_mass": self.support_mass,
            "dense_limit": self.dense_limit,
        }


@dataclass
class LoggingConfig:
    """Logging settings applied by the CLI before an experiment runs."""

    log_level: str = "INFO"
    debug_mode: bool = False
    debug_components: List[str] = field(default_factory=list)
    log_to_file: bool = True

    def validate(self) -> bool:
        return self.log_level in LOG_LEVELS

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LoggingConfig":
        debug_components = data.get("debug_components", [])
        if debug_components is None:
            debug_components = []
        return cls(
            log_level=str(data.get("log_level", "INFO")).upper(),
            debug_mode=bool(data.get("debug_mode", False)),
            debug_components=list(debug_components),
            log_to_file=bool(data.get("log_to_file", True)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "log_level": self.log_level,
            "debug_mode": self.debug_mode,
            "debug_components": list(self.debug_components),
            "log_to_file": self.log_to_file,
        }


@dataclass
class ExperimentConfig:
    """
    Complete experiment recipe.

    Aggregates the grid, potential, tolerance and logging blocks together
    with the experiment name and its parameter table.
    """

    experiment: str = ""
    grid: GridConfig = field(default_factory=GridConfig)
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    params: Dict[str, Any] = field(default_factory=dict)
    output_dir: Optional[str] = None
    seed: int = 0
    threads: Optional[int] = None

    def validate(self) -> bool:
        if not self.experiment:
            return False
        if self.threads is not None and self.threads < 1:
            return False
        return (
            self.grid.validate()
            and self.potential.validate()
            and self.tolerances.validate()
            and self.logging.validate()
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        threads = data.get("threads")
        output_dir = data.get("output_dir")
        return cls(
            experiment=str(data.get("experiment", "")),
            grid=GridConfig.from_dict(data.get("grid", {})),
            potential=PotentialConfig.from_dict(data.get("potential", {})),
            tolerances=ToleranceConfig.from_dict(data.get("tolerances", {})),
            logging=LoggingConfig.from_dict(data.get("logging", {})),
            params=copy.deepcopy(data.get("params", {})),
            output_dir=str(output_dir) if output_dir else None,
            seed=int(data.get("seed", 0)),
            threads=int(threads) if threads is not None else None,
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "experiment": self.experiment,
            "grid": self.grid.to_dict(),
            "potential": self.potential.to_dict(),
            "tolerances": self.tolerances.to_dict(),
            "logging": self.logging.to_dict(),
            "params": copy.deepcopy(self.params),
            "seed": self.seed,
        }
        if self.output_dir:
            data["output_dir"] = self.output_dir
        if self.threads is not None:
            data["threads"] = self.threads
        return data

    def config_hash(self) -> str:
        """
        SHA-256 of the canonical JSON form.

        Output directory, thread count and logging settings do not change
        results and are left out of the hash.
        """
        data = self.to_dict()
        for key in ("output_dir", "threads", "logging"):
            data.pop(key, None)
        canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class XDGPaths:
    """
    XDG Base Directory Specification compliant path management.

    Follows the FreeDesktop.org specification for application data storage:
    https://specifications.freedesktop.org/basedir-spec/basedir-spec-latest.html
    """

    APP_NAME = "relscat"

    @classmethod
    def config_home(cls) -> Path:
        xdg_config_home = os.environ.get("XDG_CONFIG_HOME")
        if xdg_config_home:
            return Path(xdg_config_home) / cls.APP_NAME
        return Path.home() / ".config" / cls.APP_NAME

    @classmethod
    def data_home(cls) -> Path:
        xdg_data_home = os.environ.get("XDG_DATA_HOME")
        if xdg_data_home:
            return Path(xdg_data_home) / cls.APP_NAME
        return Path.home() / ".local" / "share" / cls.APP_NAME

    @classmethod
    def state_home(cls) -> Path:
        xdg_state_home = os.environ.get("XDG_STATE_HOME")
        if xdg_state_home:
            return Path(xdg_state_home) / cls.APP_NAME
        return Path.home() / ".local" / "state" / cls.APP_NAME

    @classmethod
    def runs_dir(cls, experiment: str) -> Path:
        """Default output directory for an experiment's tables and summary."""
        return cls.data_home() / "runs" / experiment

    @classmethod
    def log_dir(cls) -> Path:
        return cls.state_home() / "logs"


class ConfigManager:
    """
    Loader and validator for experiment recipes.

    Recipes are merged over DEFAULT_CONFIG, checked against per-section
    allow-lists, and converted into ExperimentConfig instances.
    """

    DEFAULT_CONFIG: Dict[str, Any] = {
        "experiment": "",
        "seed": 0,
        "grid": GridConfig().to_dict(),
        "potential": PotentialConfig().to_dict(),
        "tolerances": ToleranceConfig().to_dict(),
        "logging": LoggingConfig().to_dict(),
        "params": {},
    }

    TOP_LEVEL_KEYS = frozenset(
        {"experiment", "seed", "threads", "output_dir"}
        | {"grid", "potential", "tolerances", "logging", "params"}
    )
    SECTION_KEYS: Dict[str, frozenset] = {
        "grid": frozenset(GridConfig().to_dict()),
        "potential": frozenset(PotentialConfig().to_dict()) | {"path"},
        "tolerances": frozenset(ToleranceConfig().to_dict()),
        "logging": frozenset(LoggingConfig().to_dict()),
    }

    def __init__(self) -> None:
        """Initialize the configuration manager."""
        self._logger = logging.getLogger("relscat.core.config")
        self._source_text = ""
        self._source_path: Optional[Path] = None

    def _get_default_config(self) -> Dict[str, Any]:
        """Get a fresh copy of the default configuration."""
        return copy.deepcopy(self.DEFAULT_CONFIG)

    def _merge_config(
        self, default: Dict[str, Any], loaded: Dict[str, Any]
    ) -> Dict[str, Any]:
        """
        Recursively merge loaded configuration with defaults.

        Args:
            default: Default configuration dictionary
            loaded: Loaded configuration dictionary

        Returns:
            Merged configuration dictionary
        """
        result = default.copy()

        for key, value in loaded.items():
            if (
                key in result
                and isinstance(result[key], dict)
                and isinstance(value, dict)
            ):
                result[key] = self._merge_config(result[key], value)
            else:
                result[key] = value

        return result

    def _parse(self, text: str, suffix: str) -> Dict[str, Any]:
        if suffix == ".json":
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno) from e
        else:
            try:
                data = tomllib.loads(text)
            except tomllib.TOMLDecodeError as e:
                match = re.search(r"line (\d+)", str(e))
                line = int(match.group(1)) if match else None
                raise ConfigError(f"invalid TOML: {e}", line=line) from e
        if not isinstance(data, dict):
            raise ConfigError("configuration root must be a table")
        return data

    def locate_key(self, key: str, section: Optional[str] = None) -> Optional[int]:
        """
        Find the 1-based source line defining `key` (inside `section`).

        Handles TOML table headers and JSON object keys; returns None when the
        key cannot be found in the source text.
        """
        lines = self._source_text.splitlines()
        toml_key = re.compile(rf'^\s*"?{re.escape(key)}"?\s*=')
        header = re.compile(r"^\s*\[([^\]]+)\]\s*$")

        current: Optional[str] = None
        for lineno, line in enumerate(lines, start=1):
            stripped = line.split("#", 1)[0]
            head = header.match(stripped)
            if head:
                current = head.group(1).strip()
                if section is None and current == key:
                    return lineno
                continue
            if current == section and toml_key.match(stripped):
                return lineno

        # JSON: first occurrence of the key after its section opens
        json_key = re.compile(rf'"{re.escape(key)}"\s*:')
        start = 0
        if section is not None:
            json_section = re.compile(rf'"{re.escape(section)}"\s*:')
            starts = [i for i, line in enumerate(lines) if json_section.search(line)]
            if not starts:
                return None
            start = starts[0] + 1
        for index in range(start, len(lines)):
            if json_key.search(lines[index]):
                return index + 1
        return None

    def _check_keys(self, data: Dict[str, Any]) -> None:
        for key in data:
            if key not in self.TOP_LEVEL_KEYS:
                raise ConfigError(
                    f"unknown key '{key}'", line=self.locate_key(key)
                )
        for section, allowed in self.SECTION_KEYS.items():
            block = data.get(section, {})
            if not isinstance(block, dict):
                raise ConfigError(
                    f"'{section}' must be a table", line=self.locate_key(section)
                )
            for key in block:
                if key not in allowed:
                    raise ConfigError(
                        f"unknown key '{key}' in [{section}]",
                        line=self.locate_key(key, section),
                    )
        if not isinstance(data.get("params", {}), dict):
            raise ConfigError("'params' must be a table", line=self.locate_key("params"))

    def load(self, path: Union[str, Path]) -> ExperimentConfig:
        """
        Load, merge and validate an experiment recipe.

        Args:
            path: TOML (or .json) recipe path

        Returns:
            Validated ExperimentConfig

        Raises:
            ConfigError: If the recipe is unreadable, malformed or invalid
        """
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read {path}: {e}") from e
        config = self.loads(text, suffix=path.suffix.lower())
        self._source_path = path
        self._logger.info(f"Loaded experiment recipe {path} ({config.experiment})")
        return config

    def loads(self, text: str, suffix: str = ".toml") -> ExperimentConfig:
        """Parse recipe text; see load()."""
        self._source_text = text
        data = self._parse(text, suffix)
        self._check_keys(data)

        merged = self._merge_config(self._get_default_config(), data)
        try:
            config = ExperimentConfig.from_dict(merged)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid value: {e}") from e

        self._validate(config)
        return config

    def _validate(self, config: ExperimentConfig) -> None:
        if not config.experiment:
            raise ConfigError("missing 'experiment' name", line=None)
        if not config.grid.validate():
            raise ConfigError(
                f"grid needs even n >= 16 and L > 0 (got n={config.grid.n}, "
                f"L={config.grid.L})",
                line=self.locate_key("n", "grid") or self.locate_key("grid"),
            )
        if not config.potential.validate():
            raise ConfigError(
                f"invalid potential block (kind={config.potential.kind})",
                line=self.locate_key("kind", "potential")
                or self.locate_key("potential"),
            )
        if not config.tolerances.validate():
            raise ConfigError(
                "tolerances must be positive", line=self.locate_key("tolerances")
            )
        if not config.logging.validate():
            raise ConfigError(
                f"unknown log level {config.logging.log_level}",
                line=self.locate_key("log_level", "logging"),
            )
        if config.threads is not None and config.threads < 1:
            raise ConfigError("threads must be >= 1", line=self.locate_key("threads"))

    def check_params(self, params: Dict[str, Any], allowed: Dict[str, Any]) -> None:
        """
        Reject experiment parameters that the experiment does not declare.

        Args:
            params: Parameter table from the recipe
            allowed: The experiment's default parameter table
        """
        for key in params:
            if key not in allowed:
                raise ConfigError(
                    f"unknown key '{key}' in [params]",
                    line=self.locate_key(key, "params"),
                )

    @property
    def source_path(self) -> Optional[Path]:
        """Path of the most recently loaded recipe."""
        return self._source_path


def resolve_threads(cli_threads: Optional[int], config: ExperimentConfig) -> Optional[int]:
    """
    Worker count for FFTs: --threads, then the recipe, then RELSCAT_THREADS.

    Returns None when no cap is requested.
    """
    if cli_threads is not None:
        return cli_threads
    if config.threads is not None:
        return config.threads
    env = os.environ.get("RELSCAT_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError as e:
            raise ConfigError(f"RELSCAT_THREADS must be an integer, got {env!r}") from e
        if value < 1:
            raise ConfigError("RELSCAT_THREADS must be >= 1")
        return value
    return None

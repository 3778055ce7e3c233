"""
Base experiment interface.

An experiment reads its grid, potential, tolerances and parameter table from
an ExperimentConfig, runs one numerical check and returns an
ExperimentResult carrying the acceptance verdict, scalar metrics and the
tables written as CSV.
"""

import copy
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.config import ExperimentConfig, ToleranceConfig
from ..spectral.grid import Field, Grid3, make_grid
from ..spectral.potential import Potential


@dataclass
class ExperimentInfo:
    """Registry metadata: name, one-line description and the statement checked."""

    name: str
    description: str
    statement: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ExperimentResult:
    """
    Outcome of one experiment run.

    tables map a CSV file stem to equal-length columns; fields map a file
    stem to a grid field written in the binary field format.
    """

    name: str
    passed: bool
    metrics: Dict[str, Any] = field(default_factory=dict)
    tables: Dict[str, Dict[str, Sequence]] = field(default_factory=dict)
    tolerances: Dict[str, Any] = field(default_factory=dict)
    fields: Dict[str, Field] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def summary(self, config: ExperimentConfig) -> Dict[str, Any]:
        """JSON-ready summary; no timestamps so reruns are byte-identical."""
        return jsonable(
            {
                "experiment": self.name,
                "passed": self.passed,
                "metrics": self.metrics,
                "tolerances": self.tolerances,
                "warnings": self.warnings,
                "tables": sorted(f"{stem}.csv" for stem in self.tables),
                "fields": sorted(f"{stem}.rsc" for stem in self.fields),
                "config_hash": config.config_hash(),
                "config": config.to_dict(),
            }
        )


def jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and complex numbers to JSON types."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [jsonable(value.real), jsonable(value.imag)]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


class Experiment(ABC):
    """
    Abstract base class for experiments.

    Subclasses declare DEFAULT_PARAMS; recipe parameters are merged over
    them, and keys outside DEFAULT_PARAMS are rejected by the manager.
    """

    DEFAULT_PARAMS: Dict[str, Any] = {}

    def __init__(self, config: Optional[ExperimentConfig] = None):
        """
        Initialize the experiment.

        Args:
            config: Recipe; defaults are used when omitted
        """
        self.config = config or ExperimentConfig(experiment=self.get_info().name)
        self.params: Dict[str, Any] = copy.deepcopy(self.DEFAULT_PARAMS)
        self.params.update(copy.deepcopy(self.config.params))
        self.logger = logging.getLogger(f"relscat.experiments.{self.get_info().name}")
        self.warnings: List[str] = []

    @abstractmethod
    def get_info(self) -> ExperimentInfo:
        """
        Get experiment metadata.

        Returns:
            ExperimentInfo with name, description and checked statement
        """
        pass

    @abstractmethod
    def run(self) -> ExperimentResult:
        """
        Execute the experiment.

        Returns:
            ExperimentResult with the acceptance verdict

        Raises:
            RelscatError: numerical or configuration failures
        """
        pass

    @property
    def tolerances(self) -> ToleranceConfig:
        return self.config.tolerances

    def grid(self, n: Optional[int] = None, L: Optional[float] = None) -> Grid3:
        """The recipe grid, with optional per-experiment overrides."""
        return make_grid(n or self.config.grid.n, L or self.config.grid.L)

    def potential(self) -> Potential:
        return Potential.from_config(self.config.potential)

    def warn(self, message: str) -> None:
        self.warnings.append(message)
        self.logger.warning(message)

    def result(
        self,
        passed: bool,
        metrics: Dict[str, Any],
        tables: Optional[Dict[str, Dict[str, Sequence]]] = None,
        fields: Optional[Dict[str, Field]] = None,
        tolerances: Optional[Dict[str, Any]] = None,
    ) -> ExperimentResult:
        """Assemble the result; recipe tolerances are always recorded."""
        used = self.tolerances.to_dict()
        used.update(tolerances or {})
        outcome = ExperimentResult(
            name=self.get_info().name,
            passed=bool(passed),
            metrics=metrics,
            tables=tables or {},
            tolerances=used,
            fields=fields or {},
            warnings=list(self.warnings),
        )
        self.logger.info(
            f"Experiment {outcome.name}: {'pass' if outcome.passed else 'FAIL'}"
        )
        return outcome

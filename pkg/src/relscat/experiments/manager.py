"""
Experiment manager for relscat.

This module provides the ExperimentManager class that handles experiment
discovery, registration, listing and execution.
"""

import importlib
import inspect
import logging
import pkgutil
from pathlib import Path
from typing import Dict, List, Optional, Type

from ..core.config import ConfigManager, ExperimentConfig
from ..core.error_handler import ConfigError
from .base import Experiment, ExperimentInfo, ExperimentResult

_SKIPPED_MODULES = ("base", "manager", "__init__")


class ExperimentManager:
    """
    Registry of experiments keyed by their registry name.

    Discovery imports every catalog module of this package and registers the
    concrete Experiment subclasses it defines.
    """

    def __init__(self) -> None:
        """Initialize the experiment manager."""
        self.logger = logging.getLogger("relscat.experiments.manager")
        self._registered: Dict[str, Type[Experiment]] = {}

    def discover_experiments(self, paths: Optional[List[Path]] = None) -> List[str]:
        """
        Discover experiments in the specified paths.

        Args:
            paths: Package directories to search. If None, searches this package.

        Returns:
            List of discovered experiment names
        """
        if paths is None:
            paths = [Path(__file__).parent]

        discovered = []
        for path in paths:
            if not path.exists():
                self.logger.warning(f"Experiment path does not exist: {path}")
                continue

            for module_info in pkgutil.iter_modules([str(path)]):
                if module_info.name in _SKIPPED_MODULES:
                    continue
                module_path = f"{__package__}.{module_info.name}"
                try:
                    module = importlib.import_module(module_path)
                except ImportError as e:
                    self.logger.error(
                        f"Failed to load experiment module {module_info.name}: {e}"
                    )
                    continue

                for _, obj in inspect.getmembers(module, inspect.isclass):
                    if (
                        issubclass(obj, Experiment)
                        and obj is not Experiment
                        and not inspect.isabstract(obj)
                        and obj.__module__ == module.__name__
                    ):
                        name = self.register_experiment(obj)
                        discovered.append(name)

        return sorted(discovered)

    def register_experiment(self, experiment_class: Type[Experiment]) -> str:
        """
        Register an experiment class under its registry name.

        Raises:
            ValueError: If experiment_class is not a concrete Experiment subclass
        """
        if not (
            inspect.isclass(experiment_class)
            and issubclass(experiment_class, Experiment)
            and experiment_class is not Experiment
        ):
            raise ValueError("experiment_class must be an Experiment subclass")

        name = experiment_class().get_info().name
        self._registered[name] = experiment_class
        self.logger.debug(f"Registered experiment: {name}")
        return name

    def _ensure_discovered(self) -> None:
        if not self._registered:
            self.discover_experiments()

    def get_registered_experiments(self) -> Dict[str, Type[Experiment]]:
        self._ensure_discovered()
        return dict(self._registered)

    def get_experiment_info(self, name: str) -> Optional[ExperimentInfo]:
        self._ensure_discovered()
        if name not in self._registered:
            return None
        return self._registered[name]().get_info()

    def list_experiments(self) -> List[str]:
        """One line per experiment, sorted by name."""
        self._ensure_discovered()
        lines = []
        for name in sorted(self._registered):
            info = self._registered[name]().get_info()
            lines.append(f"{name:<26} {info.description} [{info.statement}]")
        return lines

    def create(self, config: ExperimentConfig) -> Experiment:
        """
        Instantiate the experiment named by the recipe.

        Raises:
            ConfigError: unknown experiment name, or parameters the experiment
                does not declare
        """
        self._ensure_discovered()
        experiment_class = self._registered.get(config.experiment)
        if experiment_class is None:
            available = ", ".join(sorted(self._registered))
            raise ConfigError(
                f"unknown experiment '{config.experiment}'; available: {available}"
            )
        return experiment_class(config)

    def run(
        self, config: ExperimentConfig, config_manager: Optional[ConfigManager] = None
    ) -> ExperimentResult:
        """Validate the recipe's parameter table against the experiment and run it."""
        experiment = self.create(config)
        (config_manager or ConfigManager()).check_params(
            config.params, experiment.DEFAULT_PARAMS
        )
        self.logger.info(f"Running experiment {config.experiment}")
        return experiment.run()


# Global experiment manager instance
_experiment_manager: Optional[ExperimentManager] = None


def get_experiment_manager() -> ExperimentManager:
    """
    Get the global experiment manager instance.

    Returns:
        ExperimentManager instance
    """
    global _experiment_manager
    if _experiment_manager is None:
        _experiment_manager = ExperimentManager()
    return _experiment_manager

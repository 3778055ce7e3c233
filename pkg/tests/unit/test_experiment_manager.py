"""
Unit tests for experiment discovery, dispatch and result summaries.
"""

import json

import numpy as np
import pytest

from relscat.core.config import ConfigManager, ExperimentConfig
from relscat.core.error_handler import ConfigError
from relscat.experiments.base import Experiment, ExperimentInfo, jsonable
from relscat.experiments.manager import ExperimentManager
from tests.fixtures import recipe_text

CATALOG = [
    "coupling-scan",
    "eigenfunction-residual",
    "hs-scaling",
    "kato-sobolev",
    "lowenergy-expansion",
    "mourre-check",
    "propagator-appendix",
    "resolvent-consistency",
    "semigroup-check",
    "smatrix-dilation",
    "smatrix-sweep",
    "spectrum-scaling",
    "wave-dilation",
    "wave-stationary-vs-time",
    "zero-mode",
]


class ConstantExperiment(Experiment):
    DEFAULT_PARAMS = {"value": 1.5}

    def get_info(self):
        return ExperimentInfo(
            name="constant", description="returns its parameter", statement="none"
        )

    def run(self):
        value = self.params["value"]
        return self.result(value > 0, {"value": value}, tables={"t": {"x": [value]}})


@pytest.fixture
def manager():
    return ExperimentManager()


class TestDiscovery:
    def test_catalog(self, manager):
        assert manager.discover_experiments() == CATALOG
        assert sorted(manager.get_registered_experiments()) == CATALOG

    def test_listing_is_sorted(self, manager):
        lines = manager.list_experiments()
        assert [line.split()[0] for line in lines] == CATALOG
        assert "[" in lines[0]

    def test_info(self, manager):
        info = manager.get_experiment_info("hs-scaling")
        assert info.name == "hs-scaling"
        assert "s" in info.params
        assert manager.get_experiment_info("nonexistent") is None

    def test_missing_path(self, manager, tmp_path):
        assert manager.discover_experiments([tmp_path / "absent"]) == []

    def test_register_rejects(self, manager):
        with pytest.raises(ValueError):
            manager.register_experiment(Experiment)
        with pytest.raises(ValueError):
            manager.register_experiment(dict)


class TestDispatch:
    def test_unknown_experiment(self, manager):
        with pytest.raises(ConfigError) as info:
            manager.create(ExperimentConfig(experiment="nonexistent"))
        assert "hs-scaling" in str(info.value)

    def test_unknown_param(self, manager):
        config_manager = ConfigManager()
        config = config_manager.loads(recipe_text("hs-scaling", params="bogus = 1"))
        with pytest.raises(ConfigError) as info:
            manager.run(config, config_manager)
        assert info.value.line == 16

    def test_params_override_defaults(self, manager):
        manager.register_experiment(ConstantExperiment)
        config = ExperimentConfig(experiment="constant", params={"value": -2.0})
        result = manager.run(config)
        assert not result.passed
        assert result.metrics == {"value": -2.0}
        assert ConstantExperiment.DEFAULT_PARAMS == {"value": 1.5}

    def test_hs_scaling_runs(self, manager):
        config = ConfigManager().loads(recipe_text("hs-scaling"))
        result = manager.run(config)
        assert result.passed
        assert result.metrics["exponent"] == pytest.approx(0.5, abs=1e-6)
        assert set(result.tables["hs_scaling"]) == {"lambda", "hs_norm"}

    def test_mourre_commutator_is_resampled(self, manager):
        text = recipe_text(
            "mourre-check", n=48, a=0.15, width=2.0, params="random_fields = 2"
        )
        result = manager.run(ConfigManager().loads(text))
        assert result.metrics["commutator_defect"] < 1e-3
        assert result.metrics["positivity"]["passed"]
        info = manager.get_experiment_info("mourre-check")
        assert info.params["commutator_route"] == "resample"

    def test_lowenergy_band_has_an_upper_edge(self, manager):
        params = "residual_min = 0.0\nresidual_max = 0.1"
        text = recipe_text("lowenergy-expansion", n=16, L=6.0, params=params)
        result = manager.run(ConfigManager().loads(text))
        assert result.metrics["log_part_exponent"] > 0.1
        assert not result.passed
        assert manager.get_experiment_info("lowenergy-expansion").params[
            "residual_max"
        ] == pytest.approx(1.65)

    def test_semigroup_routes_agree_once_padded(self, manager):
        text = recipe_text("semigroup-check", n=48, params="times = [1.0]\npad = 3")
        result = manager.run(ConfigManager().loads(text))
        assert result.passed
        assert result.metrics["max_route_error"] < 1e-3
        assert result.metrics["periodic_route_error"] > result.metrics["max_route_error"]

    def test_propagator_appendix_passes(self, manager):
        params = "times = [1.0]\nimaginary_times = [1.0]"
        text = recipe_text("propagator-appendix", n=16, L=4.0, params=params)
        result = manager.run(ConfigManager().loads(text))
        assert result.passed
        assert result.metrics["max_relative_error"] <= 1e-2
        assert result.metrics["eps_orders"][0] >= 0.9


class TestSummary:
    def test_jsonable(self):
        data = {
            1: np.float64(2.5),
            "flag": np.bool_(True),
            "n": np.int32(3),
            "z": 1 + 2j,
            "arr": np.array([1.0, np.inf]),
            "nested": (np.nan, [np.complex128(0.5j)]),
        }
        assert jsonable(data) == {
            "1": 2.5,
            "flag": True,
            "n": 3,
            "z": [1.0, 2.0],
            "arr": [1.0, None],
            "nested": [None, [[0.0, 0.5]]],
        }

    def test_summary_is_deterministic(self):
        config = ExperimentConfig(experiment="constant")
        first = ConstantExperiment(config).run().summary(config)
        second = ConstantExperiment(config).run().summary(config)
        assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)
        assert first["tables"] == ["t.csv"]
        assert first["config_hash"] == config.config_hash()
        assert first["tolerances"]["tol_eig"] == 1e-6

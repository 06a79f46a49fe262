"""Unit tests for configuration, logging and metrics."""

import io
import json
import logging
import sys

import numpy as np
import pytest

from arcutoff.domain.errors import ConfigError
from arcutoff.domain.model.noise import NoiseKind
from arcutoff.domain.model.state import MAX_LN_N
from arcutoff.domain.service.replica_streams import StreamTag
from arcutoff.domain.value_object import ScanMode
from arcutoff.infrastructure import metrics
from arcutoff.infrastructure.config import (
    DEFAULT_LN_N,
    ExperimentConfig,
    ModelConfig,
    get_config,
    set_config,
)
from arcutoff.infrastructure.logging import StructuredFormatter, get_logger, setup_logging


def _model_dict(**overrides):
    data = {
        "d": 2,
        "p": [[0.0, 1.0], [1.0, 0.0]],
        "e": 0.55,
        "sigma": 1.0,
    }
    data.update(overrides)
    return data


@pytest.mark.unit
class TestModelConfig:

    def test_scalar_parameters_broadcast(self):
        model = ModelConfig.from_dict(_model_dict())
        assert model.d == 2
        assert model.params.e.tolist() == [0.55, 0.55]
        assert model.scan.mode is ScanMode.CYCLE
        np.testing.assert_allclose(model.x0_direction.to_numpy(), [2 ** -0.5] * 2)

    def test_explicit_sequence_is_one_based(self):
        model = ModelConfig.from_dict(_model_dict(scan={"mode": "explicit-sequence",
                                                        "sequence": [2, 1, 1]}))
        assert model.scan.sequence == (1, 0, 0)
        assert model.to_dict()["scan"]["sequence"] == [2, 1, 1]

    def test_sequence_out_of_range(self):
        with pytest.raises(ConfigError, match=r"entries \[3\] outside 1..2"):
            ModelConfig.from_dict(_model_dict(scan={"mode": "explicit-sequence",
                                                    "sequence": [1, 3]}))

    def test_sequence_zero_is_out_of_range(self):
        with pytest.raises(ConfigError, match=r"\[0\]"):
            ModelConfig.from_dict(_model_dict(scan={"mode": "explicit-sequence",
                                                    "sequence": [0, 1]}))

    def test_damping_of_one_rejected(self):
        with pytest.raises(ValueError, match="damping"):
            ModelConfig.from_dict(_model_dict(e=[1.0, 0.5]))

    def test_wrong_length(self):
        with pytest.raises(ConfigError, match="sigma"):
            ModelConfig.from_dict(_model_dict(sigma=[1.0, 1.0, 1.0]))

    def test_not_square(self):
        with pytest.raises(ConfigError):
            ModelConfig.from_dict(_model_dict(p=[[0.0, 1.0], [1.0]]))

    def test_missing_field(self):
        with pytest.raises(ConfigError):
            ModelConfig.from_dict({"d": 2, "e": 0.5})

    def test_noise_section(self):
        model = ModelConfig.from_dict(_model_dict(noise={"kind": "uniform",
                                                         "params": {"half_width": 2.0}}))
        assert model.params.noise.kind is NoiseKind.UNIFORM

    def test_reference_files_load(self, config_dir):
        model = ModelConfig.from_file(config_dir / "d3_path_laplace.json")
        assert model.d == 3
        assert model.params.noise.kind is NoiseKind.LAPLACE
        assert model.scan.is_random

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            ModelConfig.from_file(tmp_path / "absent.json")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            ModelConfig.from_file(path)


@pytest.mark.unit
class TestExperimentConfig:

    def test_cycle_run_file(self, config_dir):
        config = ExperimentConfig.from_file(config_dir / "d2_cycle.json")
        assert config.model.d == 2
        assert config.ln_n_list == pytest.approx(DEFAULT_LN_N)
        assert config.k_max == 60
        assert config.seed is None

    def test_seed_required(self, config_dir):
        config = ExperimentConfig.from_file(config_dir / "d2_random_scan.json")
        with pytest.raises(ConfigError, match="seed required"):
            config.validate()

    def test_model_required(self):
        config = ExperimentConfig(seed=1)
        with pytest.raises(ConfigError):
            config.validate()

    def test_model_path_relative_to_run_file(self, tmp_path, config_dir):
        (tmp_path / "model.json").write_text((config_dir / "d2_random_scan.json").read_text())
        run = tmp_path / "run.json"
        run.write_text(json.dumps({"model": "model.json", "experiment": {"seed": 3}}))
        config = ExperimentConfig.from_file(run)
        config.validate()
        assert config.seed == 3
        assert config.model.scan.is_random

    def test_unknown_setting(self, experiment):
        with pytest.raises(ConfigError, match="unknown"):
            experiment.apply({"colour": "red"})

    @pytest.mark.parametrize("overrides", [
        {"k_min": 5, "k_max": 4},
        {"threads": 0},
        {"replicas": 0},
        {"ln_n_list": []},
        {"ln_n_list": [1.0, -2.0]},
        {"ln_n_list": [float("nan")]},
        {"alpha": 0.1},
        {"seed": -4},
    ])
    def test_invalid_settings(self, experiment, overrides):
        experiment.apply(overrides)
        with pytest.raises(ConfigError):
            experiment.validate()

    def test_ln_n_beyond_float_range(self, experiment):
        experiment.apply({"ln_n_list": [5.0, 800.0]})
        with pytest.raises(ConfigError, match="ln_n_list"):
            experiment.validate()
        experiment.apply({"ln_n_list": [MAX_LN_N - 1.0]})
        experiment.validate()

    def test_random_scan_override(self, experiment):
        assert experiment.scan().mode is ScanMode.CYCLE
        experiment.random_scan = True
        assert experiment.scan().is_random

    def test_env_defaults(self, monkeypatch):
        monkeypatch.setenv("ARCUTOFF_THREADS", "3")
        monkeypatch.setenv("ARCUTOFF_OUT", "/tmp/somewhere")
        config = ExperimentConfig.from_env()
        assert config.threads == 3
        assert config.out_dir == "/tmp/somewhere"

    def test_prepare_out_dir(self, experiment):
        path = experiment.prepare_out_dir()
        assert path.is_dir()

    def test_to_dict_is_plain(self, experiment):
        data = experiment.to_dict()
        assert data["seed"] == 7
        assert data["model"]["d"] == 2
        assert data["scan"] == {"mode": "deterministic-cycle"}
        json.dumps(data)

    def test_stream_ids(self, experiment):
        ids = experiment.stream_ids((StreamTag.FORWARD,), replicas=3)
        assert ids == ["7/forward/0", "7/forward/2"]

    def test_global_config(self, experiment):
        set_config(experiment)
        assert get_config() is experiment


@pytest.mark.unit
class TestLogging:

    @pytest.fixture(autouse=True)
    def restore_root_logger(self):
        root = logging.getLogger()
        handlers, level = list(root.handlers), root.level
        yield
        root.handlers[:] = handlers
        root.setLevel(level)

    def test_structured_output(self):
        stream = io.StringIO()
        setup_logging("DEBUG", stream=stream)
        get_logger("arcutoff.test").info("hello", replicas=np.int64(5), value=np.float64(0.5))
        record = json.loads(stream.getvalue().strip().splitlines()[-1])
        assert record["message"] == "hello"
        assert record["level"] == "INFO"
        assert record["replicas"] == 5
        assert record["value"] == 0.5
        assert record["function"] == "test_structured_output"

    def test_level_filter(self):
        stream = io.StringIO()
        setup_logging("WARNING", stream=stream)
        log = get_logger("arcutoff.test")
        log.info("dropped")
        log.warning("kept")
        lines = stream.getvalue().strip().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["message"] == "kept"

    def test_plain_format(self):
        stream = io.StringIO()
        setup_logging("INFO", structured=False, stream=stream)
        get_logger("arcutoff.test").info("plain")
        assert " - arcutoff.test - INFO - plain" in stream.getvalue()

    def test_bound_fields(self):
        stream = io.StringIO()
        setup_logging("INFO", stream=stream)
        log = get_logger("arcutoff.test").bind(command="simulate", seed=7)
        log.info("step", k=3)
        record = json.loads(stream.getvalue().strip().splitlines()[-1])
        assert (record["command"], record["seed"], record["k"]) == ("simulate", 7, 3)

    def test_formatter_includes_exception(self):
        try:
            raise RuntimeError("boom")
        except RuntimeError:
            record = logging.LogRecord("x", logging.ERROR, __file__, 1, "failed", None,
                                       sys.exc_info())
        data = json.loads(StructuredFormatter().format(record))
        assert "RuntimeError: boom" in data["exception"]


@pytest.mark.unit
class TestMetrics:

    @pytest.fixture(autouse=True)
    def fresh_registry(self):
        metrics.reset_metrics()
        yield
        metrics.reset_metrics()

    def test_disabled_without_registry(self, tmp_path):
        assert metrics.write_metrics(str(tmp_path / "m.prom")) is False
        metrics.record_replicas("forward", 10, steps=5)

    def test_counts_replicas(self, tmp_path):
        pytest.importorskip("prometheus_client")
        assert metrics.initialize_metrics()
        metrics.record_replicas("forward", 10, steps=5)
        with metrics.timed_command("alpha") as state:
            state["status"] = "ok"
        text = metrics.get_metrics().decode()
        assert 'arcutoff_replicas_total{operation="forward"} 10.0' in text
        assert 'arcutoff_chain_steps_total{operation="forward"} 50.0' in text
        assert 'arcutoff_commands_total{command="alpha",status="ok"} 1.0' in text
        path = tmp_path / "m.prom"
        assert metrics.write_metrics(str(path))
        assert path.read_text() == text

    def test_error_status(self):
        pytest.importorskip("prometheus_client")
        metrics.initialize_metrics()
        with pytest.raises(ValueError):
            with metrics.timed_command("verify"):
                raise ValueError("bad")
        assert 'status="error"' in metrics.get_metrics().decode()

import pytest

from eqshapelets.config import (
    DEFAULT_SWEEP_THRESHOLDS,
    DiscoveryConfig,
    PreprocessConfig,
    RunConfig,
    build_config,
    load_config,
    parse_override,
)
from eqshapelets.exceptions import ConfigError, MissingInputError, UsageError


class TestDefaults:
    def test_run_config(self):
        config = RunConfig()
        assert (config.preprocess.band_low_hz, config.preprocess.band_high_hz) == (4.0, 10.0)
        assert config.preprocess.decimate_to_hz == 20.0
        assert config.discovery.max_shapelets == 8
        assert config.discovery.quality_threshold == 0.45
        assert config.forest.decision_threshold == 0.5
        assert config.detection.tolerance_seconds == 0.0
        assert config.sweep.thresholds == DEFAULT_SWEEP_THRESHOLDS

    def test_sweep_thresholds(self):
        assert DEFAULT_SWEEP_THRESHOLDS == [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5]

    def test_discovery_lengths(self):
        assert list(DiscoveryConfig().lengths(5)) == [3, 4, 5]
        assert list(DiscoveryConfig(min_len=20, max_len=45, length_step=20).lengths(600)) == [20, 40]


class TestValidation:
    @pytest.mark.parametrize(
        "values",
        [
            {"band_low_hz": 10.0, "band_high_hz": 4.0},
            {"band_high_hz": 12.0},
            {"filter_order": 3},
            {"window_seconds": 0.0},
        ],
    )
    def test_bad_preprocess(self, values):
        with pytest.raises(ConfigError):
            build_config({"preprocess": values})

    def test_band_edge_at_nyquist_is_allowed(self):
        assert PreprocessConfig(band_high_hz=10.0, decimate_to_hz=20.0).band_high_hz == 10.0

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            build_config({"forest": {"trees": 10}})

    def test_histogram_must_start_at_decision_threshold(self):
        with pytest.raises(ConfigError):
            build_config(overrides=["forest.decision_threshold=0.3"])
        config = build_config(
            overrides=["forest.decision_threshold=0.3", "detection.bin_edges=[0.3, 0.5, 0.8, 1.0]"]
        )
        assert config.detection.bin_edges[0] == 0.3

    def test_histogram_must_reach_one(self):
        with pytest.raises(ConfigError):
            build_config({"detection": {"bin_edges": [0.5, 0.9]}})

    def test_config_error_is_usage_error(self):
        assert issubclass(ConfigError, UsageError)


class TestOverrides:
    def test_parse_scalar_and_array(self):
        assert parse_override("forest.n_trees=25") == ("forest", "n_trees", 25)
        assert parse_override("sweep.thresholds=[0.1, 0.2]") == ("sweep", "thresholds", [0.1, 0.2])
        assert parse_override("discovery.z_normalize=true") == ("discovery", "z_normalize", True)

    def test_malformed(self):
        with pytest.raises(ConfigError):
            parse_override("n_trees=25")

    def test_override_wins_over_file(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("[forest]\nn_trees = 10\nseed = 4\n\n[preprocess]\nwindow_seconds = 30.0\n", encoding="utf-8")
        config = load_config(path, ["forest.n_trees=3"])
        assert (config.forest.n_trees, config.forest.seed) == (3, 4)
        assert config.preprocess.window_samples == 600

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingInputError):
            load_config(tmp_path / "absent.toml")

    def test_broken_toml(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("[forest\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

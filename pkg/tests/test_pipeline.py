import pytest

from eqshapelets import EqShapeletsManager
from eqshapelets.config import RunConfig
from eqshapelets.synth import gen_record


@pytest.fixture(scope="module")
def run_config(synth_config, preprocess_config, discovery_config, forest_params) -> RunConfig:
    return RunConfig(
        synth=synth_config, preprocess=preprocess_config, discovery=discovery_config, forest=forest_params
    )


@pytest.fixture(scope="module")
def trained(run_config):
    manager = EqShapeletsManager(run_config)
    raw, _ = manager.synth_learning_set(52, 52)
    train, test = manager.split(manager.preprocess_learning_set(raw))
    shapelets = manager.discover(train)
    manager.train(shapelets, train)
    return manager, shapelets, test


class TestSyntheticEndToEnd:
    def test_discovery_quality(self, trained):
        _, shapelets, _ = trained
        assert max(s.quality for s in shapelets) >= 0.9

    def test_held_out_accuracy(self, trained):
        manager, _, test = trained
        assert manager.evaluate(test).accuracy >= 0.95

    def test_detection_on_two_hour_record(self, trained, run_config):
        manager, _, _ = trained
        # 24 события, по одному в каждом десятом 30-секундном окне
        record_config = run_config.synth.model_copy(
            update={"duration_seconds": 7200.0, "event_times": [300.0 * i + 10.0 for i in range(24)], "seed": 21}
        )
        record, truth = gen_record(record_config)
        windows, report = manager.preprocess_record([record])
        assert len(windows) == 240
        assert report.gap_count == 0
        detections, catalog_match, detection_report = manager.detect(windows, truth.as_catalog(), truth.as_catalog())
        assert detection_report.recall >= 0.95
        assert detection_report.precision >= 0.90
        assert detection_report.catalog_matched + detection_report.new_events == len(detections)
        assert sum(detection_report.histogram) == len(detections)
        assert all(d.prob_event >= 0.5 for d in detections)
        assert set(manager.timings) >= {"synth", "preprocess", "discover", "train", "detect"}

    def test_sweep(self, trained, run_config):
        _, _, test = trained
        manager = EqShapeletsManager(run_config)
        raw, _ = manager.synth_learning_set(20, 20)
        train = manager.preprocess_learning_set(raw)
        rows = manager.sweep(train, test, [0.5, 0.3])
        assert [row.ig_threshold for row in rows] == [0.3, 0.5]
        assert rows[0].shapelet_count >= rows[1].shapelet_count
        scoring = manager.timings["sweep_scoring"]
        assert 0.0 < scoring <= manager.timings["sweep"]
        assert all(row.runtime_seconds >= scoring for row in rows)

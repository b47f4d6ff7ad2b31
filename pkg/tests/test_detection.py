import json

import numpy as np
import pytest

from eqshapelets.classifier import Forest, ShapeletForest, Tree
from eqshapelets.config import DetectionConfig, ForestParams
from eqshapelets.detection import (
    DetectionManager,
    build_report,
    label_windows,
    match_catalog,
    probability_histogram,
    read_catalog,
    review_band,
    write_catalog,
    write_detections,
)
from eqshapelets.exceptions import (
    ConfigError,
    MissingInputError,
    SeriesTooShortError,
    UsageError,
    WaveformFormatError,
)
from eqshapelets.types import CatalogEvent, Detection, Label, Shapelet, TimeSeries

WINDOW = 300.0
EDGES = [0.50, 0.60, 0.70, 0.80, 0.90, 0.96, 1.00]


def detection(index: int, prob: float = 0.9) -> Detection:
    return Detection(window_start=index * WINDOW, window_end=(index + 1) * WINDOW, prob_event=prob)


def event(name: str, time: float) -> CatalogEvent:
    return CatalogEvent(id=name, origin_time=time)


def bump_classifier(decision_threshold: float = 0.5) -> ShapeletForest:
    """Окно с пачкой [5, 5, 5] - Event, иначе Other."""
    shapelet = Shapelet(
        values=[5.0, 5.0, 5.0], length=3, quality=1.0, split_threshold=37.5, source_window_id="w", source_offset=0
    )
    tree = Tree(feature=[0, -1, -1], threshold=[37.5, 0.0, 0.0], left=[1, -1, -1], right=[2, -1, -1],
                counts=[(3, 3), (3, 0), (0, 3)])
    params = ForestParams(n_trees=1, decision_threshold=decision_threshold)
    forest = Forest(shapelets=[shapelet], trees=[tree], params=params, sample_rate_hz=1.0)
    return ShapeletForest.from_forest(forest)


def window(index: int, with_bump: bool, length: int = 10, rate: float = 1.0) -> TimeSeries:
    samples = np.zeros(length)
    if with_bump:
        samples[4:7] = 5.0
    return TimeSeries(samples=samples, sample_rate_hz=rate, start_time=index * length / rate)


class TestMatchCatalog:
    def test_event_at_window_center(self):
        result = match_catalog([detection(0)], [event("a", 150.0)])
        assert result.matches == {"a": 0}
        assert result.detections[0].matched_event_id == "a"
        assert result.missed == []

    def test_distant_event_is_missed(self):
        result = match_catalog([detection(0)], [event("a", 900.0)])
        assert result.missed == [event("a", 900.0)]
        assert result.detections[0].matched_event_id is None

    def test_tolerance(self):
        assert match_catalog([detection(0)], [event("a", 310.0)], tolerance_seconds=15.0).matches == {"a": 0}

    def test_negative_tolerance(self):
        with pytest.raises(UsageError):
            match_catalog([detection(0)], [], tolerance_seconds=-1.0)

    def test_earliest_window_wins(self):
        result = match_catalog([detection(0), detection(1)], [event("a", 300.0)])
        assert result.matches == {"a": 0}

    def test_several_events_in_one_window(self):
        result = match_catalog([detection(2)], [event("b", 700.0), event("a", 650.0)])
        assert result.matches == {"a": 0, "b": 0}
        assert result.detections[0].matched_event_id == "a"

    def test_independent_of_catalog_order(self, rng):
        detections = [detection(i) for i in (1, 4, 5, 9)]
        catalog = [event(f"e{i}", float(t)) for i, t in enumerate(rng.uniform(0, 3000, size=12))]
        expected = match_catalog(detections, catalog)
        for _ in range(5):
            shuffled = [catalog[i] for i in rng.permutation(len(catalog))]
            assert match_catalog(detections, shuffled) == expected

    def test_new_events_have_no_catalog_event(self, rng):
        detections = [detection(i) for i in sorted(rng.choice(40, size=15, replace=False))]
        catalog = [event(f"e{i}", float(t)) for i, t in enumerate(rng.uniform(0, 40 * WINDOW, size=20))]
        tolerance = 30.0
        result = match_catalog(detections, catalog, tolerance)
        for item in result.detections:
            overlapping = [
                e for e in catalog if item.window_start - tolerance <= e.origin_time <= item.window_end + tolerance
            ]
            assert (item.matched_event_id is None) == (not overlapping)
        matched_or_missed = set(result.matches) | {e.id for e in result.missed}
        assert matched_or_missed == {e.id for e in catalog}


class TestHistogram:
    def test_top_bin_is_closed(self):
        assert probability_histogram([detection(0, 1.0)], EDGES) == [0, 0, 0, 0, 0, 1]

    def test_half_open_bins(self):
        counts = probability_histogram([detection(0, 0.5), detection(1, 0.6), detection(2, 0.959)], EDGES)
        assert counts == [1, 1, 0, 0, 1, 0]

    def test_empty(self):
        assert probability_histogram([], EDGES) == [0] * 6

    def test_sum_equals_detections(self, rng):
        detections = [detection(i, float(p)) for i, p in enumerate(rng.uniform(0.5, 1.0, size=50))]
        assert sum(probability_histogram(detections, EDGES)) == 50

    def test_edges_must_ascend(self):
        with pytest.raises(UsageError):
            probability_histogram([], [0.5, 0.5, 1.0])

    def test_review_band(self):
        detections = [detection(0, 0.55), detection(1, 0.6), detection(2, 0.5)]
        assert review_band(detections) == [detections[0], detections[2]]


class TestReport:
    def test_zero_detections(self):
        report = build_report([], match_catalog([], []), bin_edges=EDGES)
        assert (report.total_detections, report.catalog_matched, report.new_events) == (0, 0, 0)
        assert report.histogram == [0] * 6
        assert report.precision is None and report.recall is None

    def test_counts_add_up(self):
        detections = [detection(i, 0.5 + 0.01 * i) for i in range(10)]
        catalog = [event("a", 100.0), event("b", 1000.0), event("c", 99999.0)]
        report = build_report(detections, match_catalog(detections, catalog), runtime_seconds=1.5, bin_edges=EDGES)
        assert report.catalog_matched == 2
        assert report.new_events == 8
        assert report.missed_catalog_events == 1
        assert report.catalog_matched + report.new_events == report.total_detections
        assert sum(report.histogram) == report.total_detections
        assert report.review_count == 10
        assert report.runtime_seconds == 1.5

    def test_false_positive_share(self):
        detections = [detection(i) for i in range(299)]
        truth = [event(f"t{i}", i * WINDOW + 10.0) for i in range(288)]
        report = build_report(detections, match_catalog(detections, []), bin_edges=EDGES, ground_truth=truth)
        assert report.false_positives == 11
        assert report.false_negatives == 0
        assert report.false_positives / report.total_detections < 0.04
        assert report.recall == 1.0


class TestLabelWindows:
    def test_labels_from_catalog(self):
        windows = [window(i, False) for i in range(4)]
        learning_set = label_windows(windows, [event("a", 15.0), event("b", 35.0)])
        assert learning_set.labels == [Label.OTHER, Label.EVENT, Label.OTHER, Label.EVENT]
        assert learning_set.window_ids[0] == "window-000000"


class TestDetectionManager:
    def test_emits_event_windows_in_order(self):
        windows = [window(i, i in (1, 3)) for i in range(5)][::-1]
        detections = DetectionManager(bump_classifier()).detect(windows)
        assert [(d.window_start, d.window_end) for d in detections] == [(10.0, 20.0), (30.0, 40.0)]
        assert all(d.prob_event == 1.0 and d.label == Label.EVENT for d in detections)

    def test_all_zero_record(self):
        assert DetectionManager(bump_classifier()).detect([window(i, False) for i in range(6)]) == []

    def test_independent_of_threads(self):
        windows = [window(i, i % 3 == 0) for i in range(30)]
        single = DetectionManager(bump_classifier(), n_jobs=1).detect(windows)
        assert DetectionManager(bump_classifier(), n_jobs=4).detect(windows) == single

    def test_window_shorter_than_shapelet(self):
        with pytest.raises(SeriesTooShortError):
            DetectionManager(bump_classifier()).detect([TimeSeries(samples=[0.0, 0.0], sample_rate_hz=1.0)])

    def test_sample_rate_mismatch(self):
        with pytest.raises(UsageError):
            DetectionManager(bump_classifier()).detect([window(0, True, rate=2.0)])

    def test_report_uses_config(self):
        manager = DetectionManager(bump_classifier(), DetectionConfig(tolerance_seconds=5.0))
        detections = manager.detect([window(i, i == 1) for i in range(3)])
        catalog_match = manager.match_catalog(detections, [event("a", 22.0)])
        report = manager.build_report(detections, catalog_match)
        assert report.catalog_matched == 1
        assert report.bin_edges == DetectionConfig().bin_edges

    def test_histogram_below_decision_threshold(self):
        with pytest.raises(ConfigError):
            DetectionManager(bump_classifier(decision_threshold=0.3)).detect([window(0, True)])

    def test_histogram_covers_every_detection(self):
        config = DetectionConfig(bin_edges=[0.3, 0.5, 1.0])
        manager = DetectionManager(bump_classifier(decision_threshold=0.3), config)
        detections = manager.detect([window(i, i % 2 == 0) for i in range(6)])
        report = manager.build_report(detections, manager.match_catalog(detections, []))
        assert report.total_detections == 3
        assert sum(report.histogram) == report.total_detections


class TestFiles:
    def test_catalog_csv(self, tmp_path):
        path = tmp_path / "catalog.csv"
        path.write_text(
            "id,origin_time_iso8601,magnitude\n"
            "b,2011-01-09T00:00:10Z,2.1\n"
            "a,1970-01-01T00:01:00Z,\n",
            encoding="utf-8",
        )
        catalog = read_catalog(path)
        assert [e.id for e in catalog] == ["a", "b"]
        assert catalog[0].origin_time == 60.0
        assert catalog[0].magnitude is None
        assert catalog[1].origin_time == 1294531210.0
        write_catalog(catalog, tmp_path / "copy.csv")
        assert read_catalog(tmp_path / "copy.csv") == catalog

    def test_catalog_missing_column(self, tmp_path):
        path = tmp_path / "catalog.csv"
        path.write_text("id,time\na,1\n", encoding="utf-8")
        with pytest.raises(WaveformFormatError):
            read_catalog(path)

    def test_catalog_missing_file(self, tmp_path):
        with pytest.raises(MissingInputError):
            read_catalog(tmp_path / "catalog.csv")

    def test_detections_json_lines(self, tmp_path):
        detections = match_catalog([detection(0, 0.75)], [event("a", 10.0)]).detections
        write_detections(detections, tmp_path / "detections.jsonl")
        lines = (tmp_path / "detections.jsonl").read_text(encoding="utf-8").splitlines()
        assert json.loads(lines[0]) == {
            "window_start": 0.0, "window_end": 300.0, "prob_event": 0.75, "matched_event_id": "a"
        }

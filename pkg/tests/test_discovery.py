import numpy as np
import pytest

from eqshapelets.classifier import ShapeletForest
from eqshapelets.config import DiscoveryConfig, ForestParams
from eqshapelets.discovery import (
    ShapeletDiscovery,
    ShapeletDocument,
    best_split,
    discover,
    entropy,
    information_gain,
    load_shapelets,
    merge,
    remove_similar,
    save_shapelets,
)
from eqshapelets.exceptions import MissingInputError, ModelFormatError, SingleClassError, UsageError
from eqshapelets.types import Label, Shapelet, Subsequence

from .helpers import make_set

E, O = Label.EVENT, Label.OTHER


def midpoint_oracle(distances, labels):
    """Полный перебор середин между различными расстояниями с правилом разрешения ничьих."""
    values = sorted(set(distances.tolist()))
    if len(values) == 1:
        return values[0], 0.0
    best_key, best = None, None
    for low, high in zip(values, values[1:]):
        threshold = (low + high) / 2
        gain = information_gain(distances, labels, threshold)
        key = (gain, high - low, -threshold)
        if best_key is None or key > best_key:
            best_key, best = key, (threshold, gain)
    return best


def shapelet(window_id: str, offset: int, length: int, quality: float) -> Shapelet:
    return Shapelet(
        values=[0.0] * length,
        length=length,
        quality=quality,
        split_threshold=1.0,
        source_window_id=window_id,
        source_offset=offset,
    )


class TestEntropy:
    def test_balanced(self):
        assert entropy([E] * 50 + [O] * 50) == 1.0

    def test_three_to_one(self):
        assert entropy([E, E, E, O]) == pytest.approx(0.811278, abs=1e-6)

    def test_pure(self):
        assert entropy([E] * 7) == 0.0

    def test_symmetric_in_classes(self, rng):
        for _ in range(50):
            labels = [E if flag else O for flag in rng.random(int(rng.integers(1, 40))) < 0.3]
            swapped = [O if label == E else E for label in labels]
            assert entropy(swapped) == entropy(labels)

    def test_empty(self):
        with pytest.raises(UsageError):
            entropy([])


class TestInformationGain:
    def test_perfect_split_on_balanced_set(self):
        distances = np.array([0.1, 0.2, 0.3, 5.0, 6.0, 7.0])
        assert information_gain(distances, [E, E, E, O, O, O], 1.0) == 1.0

    def test_useless_split(self):
        distances = np.array([1.0, 2.0, 3.0, 4.0])
        assert information_gain(distances, [E, O, E, O], 10.0) == 0.0

    def test_bounds(self, rng):
        for _ in range(100):
            distances = rng.random(20)
            labels = [E if flag else O for flag in rng.random(20) < 0.5]
            gain = information_gain(distances, labels, float(rng.random()))
            assert 0.0 <= gain <= 1.0

    def test_invariant_under_joint_permutation(self, rng):
        for _ in range(100):
            distances = rng.random(30)
            labels = [E if flag else O for flag in rng.random(30) < 0.5]
            threshold = float(rng.random())
            order = rng.permutation(30)
            permuted = information_gain(distances[order], [labels[i] for i in order], threshold)
            assert permuted == information_gain(distances, labels, threshold)


class TestBestSplit:
    def test_matches_midpoint_oracle(self, rng):
        for _ in range(500):
            size = int(rng.integers(2, 65))
            distances = rng.integers(0, 12, size=size).astype(np.float64)
            labels = [E, O] + [E if flag else O for flag in rng.random(size - 2) < 0.5]
            threshold, gain = best_split(distances, labels)
            expected_threshold, expected_gain = midpoint_oracle(distances, labels)
            assert gain == expected_gain
            assert threshold == expected_threshold

    def test_separating_threshold(self):
        threshold, gain = best_split(np.array([1.0, 2.0, 8.0, 9.0]), [E, E, O, O])
        assert (threshold, gain) == (5.0, 1.0)

    def test_constant_profile(self):
        assert best_split(np.array([3.0, 3.0, 3.0]), [E, O, E]) == (3.0, 0.0)


class TestRemoveSimilar:
    def test_overlapping_same_window(self):
        kept = remove_similar([shapelet("a", 0, 8, 0.9), shapelet("a", 4, 8, 0.8), shapelet("b", 4, 8, 0.7)])
        assert [(s.source_window_id, s.source_offset) for s in kept] == [("a", 0), ("b", 4)]

    def test_quarter_overlap_is_allowed(self):
        kept = remove_similar([shapelet("a", 0, 8, 0.9), shapelet("a", 6, 8, 0.8)])
        assert len(kept) == 2

    def test_limit(self):
        candidates = [shapelet("a", 10 * i, 8, 0.9 - 0.01 * i) for i in range(5)]
        assert len(remove_similar(candidates, limit=3)) == 3

    def test_merge_keeps_best(self):
        current = [shapelet("a", 0, 8, 0.9), shapelet("a", 20, 8, 0.5)]
        incoming = [shapelet("b", 0, 8, 0.7), shapelet("b", 20, 4, 0.9)]
        merged = merge(3, current, incoming)
        assert [(s.source_window_id, s.quality) for s in merged] == [("b", 0.9), ("a", 0.9), ("b", 0.7)]


class TestDistanceProfile:
    def test_aligned_with_windows(self, rng):
        learning_set = make_set(rng.normal(size=(5, 30)), [E, O, E, O, E])
        candidate = Subsequence(source=learning_set.windows[2].series, offset=4, length=6)
        profile = ShapeletDiscovery().distance_profile(candidate, learning_set)
        assert profile.window_ids == tuple(learning_set.window_ids)
        assert profile.distances[2] == 0.0
        assert np.all(profile.distances >= 0)


class TestDiscover:
    def test_finds_discriminative_shapelet(self, shapelets, discovery_config):
        assert 1 <= len(shapelets) <= discovery_config.max_shapelets
        assert max(s.quality for s in shapelets) >= 0.9
        assert all(s.quality >= discovery_config.quality_threshold for s in shapelets)
        assert shapelets == sorted(shapelets, key=Shapelet.sort_key)
        assert remove_similar(shapelets) == shapelets

    def test_quality_reproduced_from_profile(self, split, shapelets, discovery_config):
        train, _ = split
        discovery = ShapeletDiscovery(discovery_config)
        sources = {window.window_id: window.series for window in train}
        for found in shapelets:
            source = sources[found.source_window_id]
            candidate = Subsequence(source=source, offset=found.source_offset, length=found.length)
            profile = discovery.distance_profile(candidate, train)
            assert best_split(profile, train.labels) == (found.split_threshold, found.quality)

    def test_top_shapelet_covers_injected_wavelet(self, split, shapelets, raw_learning_set, preprocess_config):
        train, _ = split
        _, truth = raw_learning_set
        top = shapelets[0]
        source = next(window for window in train if window.window_id == top.source_window_id)
        assert source.label == E
        injected = next(event for event in truth.events if event.window_id == top.source_window_id)
        rate = preprocess_config.decimate_to_hz
        onset = int((injected.time - source.series.start_time) * rate)
        # Запас в 1 с до начала: фильтр нулевой фазы размазывает фронт назад
        wavelet_start, wavelet_end = onset - int(rate), onset + int(injected.duration * rate)
        offset, end = top.interval
        assert offset < wavelet_end and end > wavelet_start

    def test_independent_of_threads(self, split, shapelets, discovery_config):
        train, _ = split
        assert discover(train, discovery_config, n_jobs=4) == shapelets

    def test_separable_toy_set(self):
        bump = np.zeros(20)
        bump[8:12] = [3.0, 6.0, 6.0, 3.0]
        matrix = [np.roll(bump, shift) for shift in (0, 3, -3)] + [np.zeros(20)] * 3
        found = discover(make_set(matrix, [E, E, E, O, O, O]), DiscoveryConfig(min_len=4, max_len=4))
        assert found[0].quality == 1.0

    def test_high_threshold_yields_nothing(self, split, discovery_config):
        train, _ = split
        strict = discovery_config.model_copy(update={"quality_threshold": 1.1})
        assert discover(train, strict) == []

    def test_single_class(self, rng):
        with pytest.raises(SingleClassError):
            discover(make_set(rng.normal(size=(4, 20)), [E] * 4), DiscoveryConfig())


class TestSweep:
    def test_shapelet_count_non_increasing(self, split, discovery_config):
        train, test = split
        discovery = ShapeletDiscovery(discovery_config)
        thresholds = [round(0.05 * i, 2) for i in range(10, 0, -1)]
        rows = discovery.ig_threshold_sweep(train, test, thresholds, ShapeletForest(ForestParams(n_trees=10)))
        assert len(rows) == 10
        assert [row.ig_threshold for row in rows] == sorted(thresholds)
        counts = [row.shapelet_count for row in rows]
        assert all(a >= b for a, b in zip(counts, counts[1:]))
        assert all(0.0 <= row.test_accuracy <= 1.0 and row.runtime_seconds > 0 for row in rows)

    def test_empty_thresholds(self, split, discovery_config):
        train, test = split
        with pytest.raises(UsageError):
            ShapeletDiscovery(discovery_config).ig_threshold_sweep(train, test, [], ShapeletForest())


class TestShapeletDocument:
    def test_saved_and_loaded(self, tmp_path, shapelets, split, discovery_config):
        train, _ = split
        document = ShapeletDocument(
            window_len=train.window_len,
            sample_rate_hz=train.sample_rate_hz,
            config=discovery_config,
            shapelets=shapelets,
        )
        save_shapelets(document, tmp_path / "shapelets.json")
        assert load_shapelets(tmp_path / "shapelets.json") == document

    def test_unknown_version(self, tmp_path):
        path = tmp_path / "shapelets.json"
        document = ShapeletDocument(window_len=10, sample_rate_hz=20.0, config=DiscoveryConfig(), shapelets=[])
        path.write_text(document.model_dump_json().replace('"version":1', '"version":9'), encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_shapelets(path)

    def test_missing(self, tmp_path):
        with pytest.raises(MissingInputError):
            load_shapelets(tmp_path / "absent.json")

from typing import Tuple

import numpy as np
import pytest

from eqshapelets.config import DiscoveryConfig, ForestParams, PreprocessConfig, SynthConfig
from eqshapelets.core import train_test_split
from eqshapelets.discovery import discover
from eqshapelets.preprocess import PreprocessManager
from eqshapelets.synth import gen_learning_set
from eqshapelets.types import GroundTruth, LearningSet


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def synth_config() -> SynthConfig:
    return SynthConfig(
        sample_rate_hz=100.0,
        noise_sigma=1.0,
        event_amplitude_range=(9.0, 11.0),
        wavelet_dominant_hz=5.0,
        seed=7,
    )


@pytest.fixture(scope="session")
def preprocess_config() -> PreprocessConfig:
    return PreprocessConfig(window_seconds=30.0)


@pytest.fixture(scope="session")
def discovery_config() -> DiscoveryConfig:
    return DiscoveryConfig(min_len=20, max_len=40, length_step=20, offset_step=20)


@pytest.fixture(scope="session")
def forest_params() -> ForestParams:
    return ForestParams(n_trees=25, seed=3)


@pytest.fixture(scope="session")
def raw_learning_set(synth_config, preprocess_config) -> Tuple[LearningSet, GroundTruth]:
    return gen_learning_set(synth_config, 52, 52, preprocess_config.window_seconds)


@pytest.fixture(scope="session")
def learning_set(raw_learning_set, preprocess_config) -> LearningSet:
    raw, _ = raw_learning_set
    return PreprocessManager().condition_learning_set(raw, preprocess_config)


@pytest.fixture(scope="session")
def split(learning_set):
    return train_test_split(learning_set, 0.6, seed=0)


@pytest.fixture(scope="session")
def shapelets(split, discovery_config):
    train, _ = split
    return discover(train, discovery_config)

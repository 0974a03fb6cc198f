import numpy as np
import pytest

from pqmigrate.advisor import train_model
from pqmigrate.cart import TreeParams
from pqmigrate.datagen import GeneratorConfig, generate_dataset
from pqmigrate.domain import SystemRecord
from pqmigrate.forest import ForestParams


def make_record(**overrides):
    base = dict(
        system_type="payment_processing",
        security_lifetime=15,
        crypto_method="RSA",
        key_size=2048,
        system_complexity=3,
        integration_complexity=3,
        data_sensitivity=3,
    )
    base.update(overrides)
    return SystemRecord(**base)


def fuzz_valid_records(n, seed=0):
    """Valid records drawn uniformly over the whole record space (not profiles)."""
    from pqmigrate.domain import CRYPTO_METHODS, SYSTEM_TYPES, VALID_KEY_SIZES

    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        method = CRYPTO_METHODS[rng.integers(0, len(CRYPTO_METHODS))]
        keys = VALID_KEY_SIZES[method]
        out.append(
            SystemRecord(
                system_type=SYSTEM_TYPES[rng.integers(0, len(SYSTEM_TYPES))],
                security_lifetime=int(rng.integers(1, 31)),
                crypto_method=method,
                key_size=int(keys[rng.integers(0, len(keys))]),
                system_complexity=int(rng.integers(1, 6)),
                integration_complexity=int(rng.integers(1, 6)),
                data_sensitivity=int(rng.integers(1, 6)),
            )
        )
    return out


@pytest.fixture(scope="session")
def default_dataset():
    return generate_dataset(GeneratorConfig())


@pytest.fixture(scope="session")
def clean_dataset():
    return generate_dataset(GeneratorConfig(label_noise_rate=0.0))


@pytest.fixture(scope="session")
def small_model(default_dataset):
    """Quick-to-fit model for advisor/CLI/API tests."""
    model, train, test = train_model(
        default_dataset,
        tree_params=TreeParams(max_depth=5),
        forest_params=ForestParams(n_trees=25, seed=7),
        test_fraction=0.3,
        seed=7,
        generator_seed=42,
    )
    return model, train, test

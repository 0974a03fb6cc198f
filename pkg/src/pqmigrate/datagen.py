"""Rule-consistent synthetic corpus generation and consistency validation.

Each strategy class is filled by rejection sampling from its own RNG
substream, so generation is reproducible and schedule-independent: a
proposal is drawn (uniform system type, then attributes uniform within the
type's constraint profile), labeled by the shared rule table, and kept only
if it lands in the bucket's class. Optional label noise then re-labels a
small capped-binomial number of records uniformly into another class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .domain import (
    CRYPTO_METHODS,
    Dataset,
    STRATEGIES,
    SYSTEM_TYPE_PROFILES,
    SystemRecord,
    VALID_KEY_SIZES,
)
from .errors import GenerationError, InputError
from .risk import DEFAULT_PARAMS, RiskParams, match_rule

_BATCH = 2048

_METHOD_INDEX = {name: i for i, name in enumerate(CRYPTO_METHODS)}

_KEY_COUNT = np.array([len(VALID_KEY_SIZES[m]) for m in CRYPTO_METHODS])
_KEY_TABLE = np.zeros((len(CRYPTO_METHODS), int(_KEY_COUNT.max())), dtype=np.int64)
for _m, _name in enumerate(CRYPTO_METHODS):
    for _j, _k in enumerate(VALID_KEY_SIZES[_name]):
        _KEY_TABLE[_m, _j] = _k


class _SamplerTables:
    """Vectorized sampling bounds derived from a set of type profiles."""

    def __init__(self, profiles: dict):
        self.type_names = tuple(profiles)
        self.type_index = {name: i for i, name in enumerate(self.type_names)}
        self.sens_lo = np.array([profiles[t].sensitivity_range[0] for t in self.type_names])
        self.sens_hi = np.array([profiles[t].sensitivity_range[1] for t in self.type_names])
        self.sys_lo = np.array([profiles[t].system_complexity_range[0] for t in self.type_names])
        self.sys_hi = np.array([profiles[t].system_complexity_range[1] for t in self.type_names])
        self.int_lo = np.array([profiles[t].integration_complexity_range[0] for t in self.type_names])
        self.int_hi = np.array([profiles[t].integration_complexity_range[1] for t in self.type_names])
        self.life_lo = np.array([profiles[t].lifetime_range[0] for t in self.type_names])
        self.life_hi = np.array([profiles[t].lifetime_range[1] for t in self.type_names])
        self.method_count = np.array([len(profiles[t].allowed_methods) for t in self.type_names])
        self.method_table = np.zeros((len(self.type_names), int(self.method_count.max())), dtype=np.int64)
        for t, name in enumerate(self.type_names):
            for j, m in enumerate(profiles[name].allowed_methods):
                self.method_table[t, j] = _METHOD_INDEX[m]


_DEFAULT_TABLES: Optional[_SamplerTables] = None


def _tables_for(profiles: Optional[dict]) -> _SamplerTables:
    global _DEFAULT_TABLES
    if profiles is None:
        if _DEFAULT_TABLES is None:
            _DEFAULT_TABLES = _SamplerTables(SYSTEM_TYPE_PROFILES)
        return _DEFAULT_TABLES
    return _SamplerTables(profiles)


@dataclass(frozen=True)
class GeneratorConfig:
    records_per_class: int = 241
    classes: tuple[str, ...] = STRATEGIES
    label_noise_rate: float = 0.006
    seed: int = 42
    max_attempts: int = 10_000_000

    def __post_init__(self) -> None:
        if self.records_per_class < 1:
            raise InputError("records_per_class must be >= 1")
        if not (0.0 <= self.label_noise_rate <= 0.05):
            raise InputError("label_noise_rate out of [0, 0.05]")
        if not (0 <= self.seed < 2**64):
            raise InputError("seed must fit in 64 unsigned bits")
        for name in self.classes:
            if name not in STRATEGIES:
                raise InputError(f"unknown strategy class {name!r}")

    @property
    def total(self) -> int:
        return self.records_per_class * len(self.classes)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking dataset labels against the rule table."""

    total: int
    consistent: int
    consistency_ratio: float
    violations: tuple[tuple[int, str], ...]

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "consistent": self.consistent,
            "consistency_ratio": self.consistency_ratio,
            "violations": [{"index": i, "rule_id": rule_id} for i, rule_id in self.violations],
        }


def _sample_batch(
    rng: np.random.Generator,
    n: int,
    type_id: Optional[int] = None,
    tables: Optional[_SamplerTables] = None,
) -> list[SystemRecord]:
    """Draw n unlabeled records; attributes uniform within each type's profile."""
    tb = tables if tables is not None else _tables_for(None)
    if type_id is None:
        types = rng.integers(0, len(tb.type_names), size=n)
    else:
        types = np.full(n, type_id, dtype=np.int64)
    lifetimes = rng.integers(tb.life_lo[types], tb.life_hi[types] + 1)
    methods = tb.method_table[types, rng.integers(0, tb.method_count[types])]
    keys = _KEY_TABLE[methods, rng.integers(0, _KEY_COUNT[methods])]
    sys_c = rng.integers(tb.sys_lo[types], tb.sys_hi[types] + 1)
    int_c = rng.integers(tb.int_lo[types], tb.int_hi[types] + 1)
    sens = rng.integers(tb.sens_lo[types], tb.sens_hi[types] + 1)
    return [
        SystemRecord(
            system_type=tb.type_names[types[i]],
            security_lifetime=int(lifetimes[i]),
            crypto_method=CRYPTO_METHODS[methods[i]],
            key_size=int(keys[i]),
            system_complexity=int(sys_c[i]),
            integration_complexity=int(int_c[i]),
            data_sensitivity=int(sens[i]),
        )
        for i in range(n)
    ]


def sample_record(
    system_type: str,
    rng: np.random.Generator,
    profiles: Optional[dict] = None,
) -> SystemRecord:
    """One unlabeled record for the given system type."""
    tb = _tables_for(profiles)
    if system_type not in tb.type_index:
        raise InputError(f"unknown system_type {system_type!r}", field="system_type")
    return _sample_batch(rng, 1, type_id=tb.type_index[system_type], tables=tb)[0]


def _fill_bucket(
    strategy: str,
    count: int,
    rng: np.random.Generator,
    params: RiskParams,
    max_attempts: int,
    tables: _SamplerTables,
) -> list[SystemRecord]:
    accepted: list[SystemRecord] = []
    attempts = 0
    while len(accepted) < count:
        if attempts >= max_attempts:
            raise GenerationError(
                f"could not fill class {strategy!r}: {len(accepted)}/{count} "
                f"records after {attempts} attempts"
            )
        for record in _sample_batch(rng, _BATCH, tables=tables):
            attempts += 1
            if match_rule(record, params)["strategy"] == strategy:
                accepted.append(record.with_label(strategy))
                if len(accepted) == count:
                    break
            if attempts >= max_attempts:
                break
    return accepted


def apply_label_noise(
    records: Sequence[SystemRecord],
    rate: float,
    rng: np.random.Generator,
    cap_factor: float = 1.5,
) -> tuple[list[SystemRecord], list[int]]:
    """Re-label a small random subset into uniformly chosen other classes.

    The flip count is binomial, capped at ceil(cap_factor * rate * n) so the
    corrupted fraction cannot drift far above the configured rate.
    Returns the noisy records and the sorted flipped indices.
    """
    records = list(records)
    if rate == 0.0 or not records:
        return records, []
    total = len(records)
    cap = math.ceil(cap_factor * rate * total)
    n_flips = min(int(rng.binomial(total, rate)), cap)
    if n_flips == 0:
        return records, []
    flipped = sorted(int(i) for i in rng.choice(total, size=n_flips, replace=False))
    for i in flipped:
        current = records[i].recommended_strategy
        others = [s for s in STRATEGIES if s != current]
        records[i] = records[i].with_label(others[int(rng.integers(0, len(others)))])
    return records, flipped


def generate_dataset(
    config: GeneratorConfig,
    params: RiskParams = DEFAULT_PARAMS,
    profiles: Optional[dict] = None,
) -> Dataset:
    """Balanced labeled dataset: records_per_class records for each strategy.

    Balance is exact before noise; the same seed always yields a
    byte-identical dataset.
    """
    tables = _tables_for(profiles)
    root = np.random.SeedSequence(config.seed)
    streams = root.spawn(len(config.classes) + 2)
    records: list[SystemRecord] = []
    for i, strategy in enumerate(config.classes):
        bucket_rng = np.random.default_rng(streams[i])
        records.extend(
            _fill_bucket(
                strategy, config.records_per_class, bucket_rng, params, config.max_attempts, tables
            )
        )
    noise_rng = np.random.default_rng(streams[-2])
    records, _ = apply_label_noise(records, config.label_noise_rate, noise_rng)
    shuffle_rng = np.random.default_rng(streams[-1])
    order = shuffle_rng.permutation(len(records))
    return Dataset([records[i] for i in order])


def validate_consistency(dataset: Dataset, params: RiskParams = DEFAULT_PARAMS) -> ValidationReport:
    """Check each label against the rule table's verdict for its record.

    A violation reports the rule that actually fires for the record, i.e.
    the rule whose strategy the label should have matched.
    """
    if len(dataset) == 0:
        raise InputError("cannot validate an empty dataset")
    violations: list[tuple[int, str]] = []
    for i, record in enumerate(dataset):
        if record.recommended_strategy is None:
            raise InputError(f"record {i} is unlabeled")
        rule = match_rule(record, params)
        if rule["strategy"] != record.recommended_strategy:
            violations.append((i, rule["id"]))
    consistent = len(dataset) - len(violations)
    return ValidationReport(
        total=len(dataset),
        consistent=consistent,
        consistency_ratio=consistent / len(dataset),
        violations=tuple(violations),
    )

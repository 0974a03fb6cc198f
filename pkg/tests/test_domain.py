import numpy as np
import pytest

from pqmigrate.datagen import sample_record
from pqmigrate.domain import (
    CRYPTO_METHODS,
    CSV_COLUMNS,
    Dataset,
    DomainConstraint,
    METHOD_QUANTUM_CLASS,
    STRATEGIES,
    STRATEGY_URGENCY,
    SYSTEM_TYPES,
    SYSTEM_TYPE_PROFILES,
    SystemRecord,
    URGENCY_STRATEGY,
    QuantumClass,
    quantum_class,
    validate_record,
)
from pqmigrate.errors import InputError

from conftest import make_record, fuzz_valid_records


def test_urgency_bijection_round_trips():
    assert len(STRATEGY_URGENCY) == 5
    for name, idx in STRATEGY_URGENCY.items():
        assert URGENCY_STRATEGY[idx] == name
    for idx, name in URGENCY_STRATEGY.items():
        assert STRATEGY_URGENCY[name] == idx
    assert STRATEGY_URGENCY["no_action_needed"] == 1
    assert STRATEGY_URGENCY["monitor_and_prepare"] == 2
    assert STRATEGY_URGENCY["scheduled_transition"] == 3
    assert STRATEGY_URGENCY["immediate_hybrid"] == 4
    assert STRATEGY_URGENCY["immediate_replacement"] == 5


def test_quantum_class_total_over_all_methods():
    assert len(CRYPTO_METHODS) == 11
    for method in CRYPTO_METHODS:
        quantum_class(method)
    assert quantum_class("RSA") is QuantumClass.VULNERABLE
    assert quantum_class("ECC") is QuantumClass.VULNERABLE
    assert quantum_class("DH") is QuantumClass.VULNERABLE
    assert quantum_class("TRIPLE_DES") is QuantumClass.VULNERABLE
    assert quantum_class("AES") is QuantumClass.NEUTRAL
    assert quantum_class("HYBRID_RSA_PQC") is QuantumClass.HYBRID
    assert quantum_class("HYBRID_ECC_PQC") is QuantumClass.HYBRID
    for method in ("CRYSTALS_KYBER", "CRYSTALS_DILITHIUM", "FALCON", "SPHINCS_PLUS"):
        assert quantum_class(method) is QuantumClass.RESISTANT
    with pytest.raises(InputError):
        quantum_class("ROT13")


def test_validate_record_accepts_in_range_rsa():
    assert validate_record(make_record()) == []


def test_validate_record_flags_out_of_range_sensitivity():
    violations = validate_record(make_record(data_sensitivity=6))
    assert len(violations) == 1
    assert violations[0].field == "data_sensitivity"
    assert "[1,5]" in violations[0].message


def test_validate_record_flags_bad_key_size_for_method():
    violations = validate_record(make_record(crypto_method="CRYSTALS_KYBER", key_size=2048))
    assert [v.field for v in violations] == ["key_size"]
    assert violations[0].message == "key_size not in {512,768,1024} for CRYSTALS_KYBER"


def test_validate_record_flags_unknown_names_and_bounds():
    assert validate_record(make_record(system_type="mainframe"))[0].field == "system_type"
    assert validate_record(make_record(crypto_method="ROT13"))[0].field == "crypto_method"
    assert validate_record(make_record(security_lifetime=0))[0].field == "security_lifetime"
    assert validate_record(make_record(security_lifetime=31))[0].field == "security_lifetime"
    assert validate_record(make_record(recommended_strategy="panic"))[0].field == "recommended_strategy"
    assert validate_record(make_record(system_complexity="high"))[0].field == "system_complexity"


def test_every_profile_method_and_interval_is_wellformed():
    assert len(SYSTEM_TYPES) == 13
    for name, profile in SYSTEM_TYPE_PROFILES.items():
        for method in profile.allowed_methods:
            assert method in METHOD_QUANTUM_CLASS
    with pytest.raises(InputError):
        DomainConstraint((2, 1), (1, 5), (1, 5), (1, 30), ("RSA",))
    with pytest.raises(InputError):
        DomainConstraint((1, 5), (1, 5), (1, 5), (1, 30), ())


def test_sampled_records_always_validate():
    for seed, system_type in enumerate(SYSTEM_TYPES):
        rng = np.random.default_rng(seed)
        for _ in range(50):
            record = sample_record(system_type, rng)
            assert validate_record(record) == [], record


def test_record_dict_round_trip():
    record = make_record(recommended_strategy="immediate_hybrid")
    assert SystemRecord.from_dict(record.to_dict()) == record
    unlabeled = make_record()
    assert "recommended_strategy" not in unlabeled.to_dict()


def test_record_from_dict_rejects_bad_shapes():
    good = make_record().to_dict()
    with pytest.raises(InputError) as exc:
        SystemRecord.from_dict({k: v for k, v in good.items() if k != "key_size"})
    assert exc.value.field == "key_size"
    with pytest.raises(InputError) as exc:
        SystemRecord.from_dict({**good, "favorite_color": "blue"})
    assert exc.value.field == "favorite_color"
    with pytest.raises(InputError):
        SystemRecord.from_dict({**good, "data_sensitivity": "very"})
    # integral floats from JSON are tolerated
    assert SystemRecord.from_dict({**good, "data_sensitivity": 3.0}).data_sensitivity == 3


def test_dataset_csv_round_trip(tmp_path, default_dataset):
    subset = default_dataset[:100]
    path = tmp_path / "subset.csv"
    subset.to_csv(path)
    header = path.read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
    assert Dataset.from_csv(path) == subset


def test_dataset_jsonl_round_trip(tmp_path, default_dataset):
    subset = default_dataset[:100]
    path = tmp_path / "subset.jsonl"
    subset.to_jsonl(path)
    assert Dataset.from_jsonl(path) == subset


def test_fuzzed_records_are_valid():
    for record in fuzz_valid_records(300, seed=3):
        assert validate_record(record) == []


def test_strategies_ordered_by_urgency():
    assert list(STRATEGIES) == [URGENCY_STRATEGY[i] for i in range(1, 6)]

"""Shared vocabulary: cryptographic methods, migration strategies, system types.

Every other module builds on the enumerations and the record type defined
here. All values are immutable; records are plain frozen dataclasses that
serialize to flat JSON objects / CSV rows.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

from .errors import InputError


class QuantumClass(str, Enum):
    """Susceptibility of a cryptographic method to quantum attack."""

    VULNERABLE = "Vulnerable"
    NEUTRAL = "Neutral"
    HYBRID = "Hybrid"
    RESISTANT = "Resistant"


# Method name -> quantum class. Total over all supported methods.
METHOD_QUANTUM_CLASS = {
    "RSA": QuantumClass.VULNERABLE,
    "ECC": QuantumClass.VULNERABLE,
    "DH": QuantumClass.VULNERABLE,
    "TRIPLE_DES": QuantumClass.VULNERABLE,
    "AES": QuantumClass.NEUTRAL,
    "HYBRID_RSA_PQC": QuantumClass.HYBRID,
    "HYBRID_ECC_PQC": QuantumClass.HYBRID,
    "CRYSTALS_KYBER": QuantumClass.RESISTANT,
    "CRYSTALS_DILITHIUM": QuantumClass.RESISTANT,
    "FALCON": QuantumClass.RESISTANT,
    "SPHINCS_PLUS": QuantumClass.RESISTANT,
}

CRYPTO_METHODS = tuple(METHOD_QUANTUM_CLASS)

# Valid key sizes (bits; security level for CRYSTALS_DILITHIUM) per method.
VALID_KEY_SIZES = {
    "RSA": (1024, 2048, 3072, 4096),
    "DH": (1024, 2048, 3072, 4096),
    "ECC": (160, 224, 256, 384, 521),
    "TRIPLE_DES": (112, 168),
    "AES": (128, 192, 256),
    "CRYSTALS_KYBER": (512, 768, 1024),
    "CRYSTALS_DILITHIUM": (2, 3, 5),
    "FALCON": (512, 1024),
    "SPHINCS_PLUS": (128, 192, 256),
    "HYBRID_RSA_PQC": (2048, 3072, 4096),
    "HYBRID_ECC_PQC": (256, 384, 521),
}

# Migration strategies ordered by urgency index (position + 1).
STRATEGIES = (
    "no_action_needed",
    "monitor_and_prepare",
    "scheduled_transition",
    "immediate_hybrid",
    "immediate_replacement",
)

STRATEGY_URGENCY = {name: i + 1 for i, name in enumerate(STRATEGIES)}
URGENCY_STRATEGY = {i + 1: name for i, name in enumerate(STRATEGIES)}

SCALE_MIN, SCALE_MAX = 1, 5
LIFETIME_MIN, LIFETIME_MAX = 1, 30


def quantum_class(method: str) -> QuantumClass:
    """Quantum class of a method name; raises InputError for unknown names."""
    try:
        return METHOD_QUANTUM_CLASS[method]
    except KeyError:
        raise InputError(f"unknown crypto_method {method!r}", field="crypto_method") from None


@dataclass(frozen=True)
class DomainConstraint:
    """Sampling bounds for one system type.

    All interval bounds are inclusive. ``allowed_methods`` restricts which
    cryptographic methods the type plausibly deploys.
    """

    sensitivity_range: tuple[int, int]
    system_complexity_range: tuple[int, int]
    integration_complexity_range: tuple[int, int]
    lifetime_range: tuple[int, int]
    allowed_methods: tuple[str, ...]

    def __post_init__(self) -> None:
        for name, (lo, hi), bound in (
            ("sensitivity_range", self.sensitivity_range, (SCALE_MIN, SCALE_MAX)),
            ("system_complexity_range", self.system_complexity_range, (SCALE_MIN, SCALE_MAX)),
            ("integration_complexity_range", self.integration_complexity_range, (SCALE_MIN, SCALE_MAX)),
            ("lifetime_range", self.lifetime_range, (LIFETIME_MIN, LIFETIME_MAX)),
        ):
            if not (bound[0] <= lo <= hi <= bound[1]):
                raise InputError(f"{name} {lo, hi} not a nonempty interval within {bound}")
        if not self.allowed_methods:
            raise InputError("allowed_methods must be nonempty")
        for m in self.allowed_methods:
            quantum_class(m)


# Per-type sampling profiles. Sensitivity, complexity and lifetime anchors:
# regulated/critical domains sit high on sensitivity and lifetime, consumer
# and telemetry systems low; embedded systems carry high integration cost.
SYSTEM_TYPE_PROFILES = {
    "payment_processing": DomainConstraint(
        sensitivity_range=(4, 5),
        system_complexity_range=(3, 5),
        integration_complexity_range=(3, 5),
        lifetime_range=(5, 20),
        allowed_methods=("RSA", "TRIPLE_DES", "HYBRID_RSA_PQC"),
    ),
    "secure_messaging": DomainConstraint(
        sensitivity_range=(3, 5),
        system_complexity_range=(3, 4),
        integration_complexity_range=(2, 4),
        lifetime_range=(3, 15),
        allowed_methods=("RSA", "AES"),
    ),
    "certificate_authority": DomainConstraint(
        sensitivity_range=(4, 5),
        system_complexity_range=(3, 5),
        integration_complexity_range=(3, 5),
        lifetime_range=(10, 30),
        allowed_methods=("RSA", "ECC", "CRYSTALS_DILITHIUM", "HYBRID_RSA_PQC"),
    ),
    "healthcare_records": DomainConstraint(
        sensitivity_range=(4, 5),
        system_complexity_range=(3, 4),
        integration_complexity_range=(2, 5),
        lifetime_range=(8, 25),
        allowed_methods=("RSA", "ECC", "TRIPLE_DES", "HYBRID_RSA_PQC"),
    ),
    "military_communications": DomainConstraint(
        sensitivity_range=(4, 5),
        system_complexity_range=(3, 5),
        integration_complexity_range=(3, 5),
        lifetime_range=(10, 30),
        allowed_methods=("RSA", "TRIPLE_DES", "SPHINCS_PLUS", "HYBRID_ECC_PQC"),
    ),
    "government_infrastructure": DomainConstraint(
        sensitivity_range=(3, 5),
        system_complexity_range=(3, 5),
        integration_complexity_range=(3, 5),
        lifetime_range=(10, 30),
        allowed_methods=("RSA", "DH", "TRIPLE_DES", "AES", "HYBRID_RSA_PQC"),
    ),
    "internet_banking": DomainConstraint(
        sensitivity_range=(4, 5),
        system_complexity_range=(3, 5),
        integration_complexity_range=(2, 5),
        lifetime_range=(5, 15),
        allowed_methods=("RSA", "AES", "HYBRID_RSA_PQC"),
    ),
    "e_commerce": DomainConstraint(
        sensitivity_range=(2, 3),
        system_complexity_range=(2, 4),
        integration_complexity_range=(2, 4),
        lifetime_range=(3, 10),
        allowed_methods=("RSA", "AES", "CRYSTALS_KYBER"),
    ),
    "cloud_service": DomainConstraint(
        sensitivity_range=(2, 4),
        system_complexity_range=(3, 5),
        integration_complexity_range=(3, 5),
        lifetime_range=(3, 15),
        allowed_methods=("RSA", "AES"),
    ),
    "iot_device": DomainConstraint(
        sensitivity_range=(1, 3),
        system_complexity_range=(1, 3),
        integration_complexity_range=(2, 4),
        lifetime_range=(2, 10),
        allowed_methods=("CRYSTALS_KYBER", "FALCON"),
    ),
    "embedded_system": DomainConstraint(
        sensitivity_range=(1, 3),
        system_complexity_range=(1, 3),
        integration_complexity_range=(3, 5),
        lifetime_range=(5, 20),
        allowed_methods=("AES", "FALCON"),
    ),
    "weather_forecasting": DomainConstraint(
        sensitivity_range=(1, 2),
        system_complexity_range=(1, 3),
        integration_complexity_range=(1, 3),
        lifetime_range=(1, 10),
        allowed_methods=("RSA", "AES", "CRYSTALS_KYBER"),
    ),
    "wireless_network": DomainConstraint(
        sensitivity_range=(1, 3),
        system_complexity_range=(1, 2),
        integration_complexity_range=(1, 3),
        lifetime_range=(1, 8),
        allowed_methods=("DH", "CRYSTALS_KYBER"),
    ),
}

SYSTEM_TYPES = tuple(SYSTEM_TYPE_PROFILES)

# Canonical serialization order for CSV and JSON records.
CSV_COLUMNS = (
    "system_type",
    "security_lifetime",
    "crypto_method",
    "key_size",
    "system_complexity",
    "integration_complexity",
    "data_sensitivity",
    "recommended_strategy",
)

INT_FIELDS = (
    "security_lifetime",
    "key_size",
    "system_complexity",
    "integration_complexity",
    "data_sensitivity",
)


@dataclass(frozen=True)
class SystemRecord:
    """One cryptographic system configuration, optionally labeled."""

    system_type: str
    security_lifetime: int
    crypto_method: str
    key_size: int
    system_complexity: int
    integration_complexity: int
    data_sensitivity: int
    recommended_strategy: Optional[str] = None

    def to_dict(self, include_label: bool = True) -> dict:
        d = {
            "system_type": self.system_type,
            "security_lifetime": self.security_lifetime,
            "crypto_method": self.crypto_method,
            "key_size": self.key_size,
            "system_complexity": self.system_complexity,
            "integration_complexity": self.integration_complexity,
            "data_sensitivity": self.data_sensitivity,
        }
        if include_label and self.recommended_strategy is not None:
            d["recommended_strategy"] = self.recommended_strategy
        return d

    def with_label(self, strategy: Optional[str]) -> "SystemRecord":
        return replace(self, recommended_strategy=strategy)

    @classmethod
    def from_dict(cls, data: dict) -> "SystemRecord":
        """Build a record from a flat JSON-style dict.

        Missing or non-integer fields raise InputError naming the field;
        value-level bounds are left to validate_record.
        """
        if not isinstance(data, dict):
            raise InputError("record must be a JSON object")
        unknown = set(data) - set(CSV_COLUMNS)
        if unknown:
            field = sorted(unknown)[0]
            raise InputError(f"unknown record field {field!r}", field=field)
        kwargs = {}
        for field in ("system_type", "crypto_method"):
            if field not in data:
                raise InputError(f"missing record field {field!r}", field=field)
            kwargs[field] = data[field]
        for field in INT_FIELDS:
            if field not in data:
                raise InputError(f"missing record field {field!r}", field=field)
            value = data[field]
            if isinstance(value, bool) or not isinstance(value, int):
                # Tolerate exact integral floats from JSON ("5.0"), nothing else.
                if isinstance(value, float) and value.is_integer():
                    value = int(value)
                else:
                    raise InputError(f"{field} must be an integer", field=field)
            kwargs[field] = value
        kwargs["recommended_strategy"] = data.get("recommended_strategy")
        return cls(**kwargs)


@dataclass(frozen=True)
class Violation:
    """One failed record invariant."""

    field: str
    message: str

    def __str__(self) -> str:
        return self.message


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def validate_record(record: SystemRecord) -> list[Violation]:
    """Check every record invariant; an empty list means the record is valid.

    Violations are data, not exceptions: each names the offending field and
    the bound it breaks.
    """
    violations: list[Violation] = []
    if record.system_type not in SYSTEM_TYPE_PROFILES:
        violations.append(Violation("system_type", f"unknown system_type {record.system_type!r}"))
    if record.crypto_method not in METHOD_QUANTUM_CLASS:
        violations.append(Violation("crypto_method", f"unknown crypto_method {record.crypto_method!r}"))
    if not _is_int(record.security_lifetime) or not (
        LIFETIME_MIN <= record.security_lifetime <= LIFETIME_MAX
    ):
        violations.append(
            Violation(
                "security_lifetime",
                f"security_lifetime out of [{LIFETIME_MIN},{LIFETIME_MAX}]",
            )
        )
    for field in ("system_complexity", "integration_complexity", "data_sensitivity"):
        value = getattr(record, field)
        if not _is_int(value) or not (SCALE_MIN <= value <= SCALE_MAX):
            violations.append(Violation(field, f"{field} out of [{SCALE_MIN},{SCALE_MAX}]"))
    if record.crypto_method in VALID_KEY_SIZES:
        valid = VALID_KEY_SIZES[record.crypto_method]
        if not _is_int(record.key_size) or record.key_size not in valid:
            valid_set = "{" + ",".join(str(k) for k in valid) + "}"
            violations.append(
                Violation(
                    "key_size",
                    f"key_size not in {valid_set} for {record.crypto_method}",
                )
            )
    elif not _is_int(record.key_size) or record.key_size <= 0:
        violations.append(Violation("key_size", "key_size must be a positive integer"))
    if record.recommended_strategy is not None and record.recommended_strategy not in STRATEGY_URGENCY:
        violations.append(
            Violation(
                "recommended_strategy",
                f"unknown strategy {record.recommended_strategy!r}",
            )
        )
    return violations


def require_valid(record: SystemRecord) -> None:
    """Raise InputError on the first invariant violation."""
    violations = validate_record(record)
    if violations:
        raise InputError("; ".join(str(v) for v in violations), field=violations[0].field)


class Dataset:
    """An ordered collection of system records."""

    def __init__(self, records: Sequence[SystemRecord]):
        self.records = list(records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SystemRecord]:
        return iter(self.records)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return Dataset(self.records[index])
        return self.records[index]

    def __eq__(self, other) -> bool:
        return isinstance(other, Dataset) and self.records == other.records

    def labels(self) -> list[Optional[str]]:
        return [r.recommended_strategy for r in self.records]

    def class_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in STRATEGIES}
        for r in self.records:
            if r.recommended_strategy is not None:
                counts[r.recommended_strategy] += 1
        return counts

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset([self.records[i] for i in indices])

    # --- serialization ---

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            handle.write(self.to_csv_string())

    @classmethod
    def from_csv(cls, path: str | Path) -> "Dataset":
        with open(path, "r", newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or tuple(header) != CSV_COLUMNS:
                raise InputError(f"unexpected CSV header in {path}")
            records = []
            for row in reader:
                if len(row) != len(CSV_COLUMNS):
                    raise InputError(f"malformed CSV row: {row!r}")
                records.append(
                    SystemRecord(
                        system_type=row[0],
                        security_lifetime=int(row[1]),
                        crypto_method=row[2],
                        key_size=int(row[3]),
                        system_complexity=int(row[4]),
                        integration_complexity=int(row[5]),
                        data_sensitivity=int(row[6]),
                        recommended_strategy=row[7] or None,
                    )
                )
        return cls(records)

    def to_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            for r in self.records:
                handle.write(json.dumps(r.to_dict(), sort_keys=False) + "\n")

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "Dataset":
        records = []
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    records.append(SystemRecord.from_dict(json.loads(line)))
        return cls(records)

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            writer.writerow(
                [
                    r.system_type,
                    r.security_lifetime,
                    r.crypto_method,
                    r.key_size,
                    r.system_complexity,
                    r.integration_complexity,
                    r.data_sensitivity,
                    r.recommended_strategy if r.recommended_strategy is not None else "",
                ]
            )
        return buf.getvalue()

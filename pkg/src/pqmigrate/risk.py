"""Quantum-risk scoring and the deterministic strategy labeling rules.

The composite risk of a system over a planning horizon is the product of
three factors:

    r = v * s * p

where v scores how exposed the deployed method/key-size combination is,
s scales by data sensitivity (d / 5), and p is a logistic estimate of the
threat materializing within t years.  Strategy labels come from an ordered
rule table evaluated first-match-wins; the table is plain data so it can be
loaded from a JSON config and refined without code changes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from .domain import (
    METHOD_QUANTUM_CLASS,
    STRATEGY_URGENCY,
    SystemRecord,
    VALID_KEY_SIZES,
    QuantumClass,
    quantum_class,
    require_valid,
)
from .errors import InputError

# Exposure bands per method: (key size upper bound or None, value), matched
# in order. Legacy methods score high, post-quantum methods near zero.
DEFAULT_VULNERABILITY_TABLE = {
    "RSA": ((1024, 0.95), (2048, 0.85), (None, 0.75)),
    "DH": ((1024, 0.95), (2048, 0.85), (None, 0.75)),
    "ECC": ((160, 0.95), (256, 0.85), (None, 0.75)),
    "TRIPLE_DES": ((None, 0.95),),
    "AES": ((255, 0.40), (None, 0.10)),
    "CRYSTALS_KYBER": ((None, 0.05),),
    "CRYSTALS_DILITHIUM": ((None, 0.05),),
    "FALCON": ((None, 0.05),),
    "SPHINCS_PLUS": ((None, 0.05),),
    "HYBRID_RSA_PQC": ((None, 0.30),),
    "HYBRID_ECC_PQC": ((None, 0.30),),
}

# Ordered labeling rules, first match wins. Atoms within "when" are ANDed;
# {"any": [...]} takes the disjunction of its atoms. The final rule has an
# empty condition list so the table is total over valid records.
#
# The sensitive-long-lifetime rules are ordered before the weak-key rule:
# otherwise upgrading a key (e.g. RSA 2048 -> 3072) on a simple, highly
# sensitive system would move its label from immediate_hybrid to
# immediate_replacement, breaking the monotone key-size guarantee.
DEFAULT_LABELING_RULES = (
    {
        "id": "resistant_no_action",
        "when": [{"quantum_class": "Resistant"}],
        "strategy": "no_action_needed",
    },
    {
        "id": "hybrid_monitor",
        "when": [{"quantum_class": "Hybrid"}],
        "strategy": "monitor_and_prepare",
    },
    {
        "id": "legacy_broken_replace",
        "when": [
            {
                "any": [
                    {"method_in": ["TRIPLE_DES"]},
                    {"key_at_most": {"RSA": 1024, "DH": 1024, "ECC": 160}},
                ]
            }
        ],
        "strategy": "immediate_replacement",
    },
    {
        "id": "strong_aes_no_action",
        "when": [{"method_in": ["AES"]}, {"field_at_least": ["key_size", 256]}],
        "strategy": "no_action_needed",
    },
    {
        "id": "weak_aes_long_life_transition",
        "when": [{"method_in": ["AES"]}, {"lifetime_exceeds_threshold": True}],
        "strategy": "scheduled_transition",
    },
    {
        "id": "weak_aes_monitor",
        "when": [{"method_in": ["AES"]}],
        "strategy": "monitor_and_prepare",
    },
    {
        "id": "sensitive_long_life_simple_replace",
        "when": [
            {"quantum_class": "Vulnerable"},
            {"field_at_least": ["data_sensitivity", 4]},
            {"lifetime_exceeds_threshold": True},
            {"field_at_most": ["system_complexity", 2]},
        ],
        "strategy": "immediate_replacement",
    },
    {
        "id": "sensitive_long_life_complex_hybrid",
        "when": [
            {"quantum_class": "Vulnerable"},
            {"field_at_least": ["data_sensitivity", 4]},
            {"lifetime_exceeds_threshold": True},
        ],
        "strategy": "immediate_hybrid",
    },
    {
        "id": "weak_key_complex_hybrid",
        "when": [
            {"quantum_class": "Vulnerable"},
            {"key_at_most": {"RSA": 2048, "DH": 2048, "ECC": 256}},
            {
                "any": [
                    {"field_at_least": ["integration_complexity", 4]},
                    {"field_at_least": ["system_complexity", 3]},
                ]
            },
        ],
        "strategy": "immediate_hybrid",
    },
    {
        "id": "long_life_transition",
        "when": [{"quantum_class": "Vulnerable"}, {"lifetime_exceeds_threshold": True}],
        "strategy": "scheduled_transition",
    },
    {
        "id": "short_life_sensitive_transition",
        "when": [{"quantum_class": "Vulnerable"}, {"field_at_least": ["data_sensitivity", 3]}],
        "strategy": "scheduled_transition",
    },
    {
        "id": "fallback_monitor",
        "when": [],
        "strategy": "monitor_and_prepare",
    },
)

_COMPARABLE_FIELDS = (
    "security_lifetime",
    "key_size",
    "system_complexity",
    "integration_complexity",
    "data_sensitivity",
)


def _check_atom(atom: dict) -> None:
    known = {"quantum_class", "method_in", "key_at_most", "field_at_least", "field_at_most", "lifetime_exceeds_threshold", "any"}
    keys = set(atom)
    if len(keys) != 1 or not keys <= known:
        raise InputError(f"malformed rule atom {atom!r}")
    if "any" in atom:
        for sub in atom["any"]:
            _check_atom(sub)
    if "quantum_class" in atom:
        QuantumClass(atom["quantum_class"])
    for key in ("field_at_least", "field_at_most"):
        if key in atom and atom[key][0] not in _COMPARABLE_FIELDS:
            raise InputError(f"rule atom compares unknown field {atom[key][0]!r}")


@dataclass(frozen=True)
class RiskParams:
    """Scoring constants plus the labeling rule table."""

    vulnerability_table: dict = field(default_factory=lambda: dict(DEFAULT_VULNERABILITY_TABLE))
    sensitivity_divisor: float = 5.0
    threat_midpoint_years: float = 15.0
    threat_scale_years: float = 3.0
    lifetime_threshold_years: int = 10
    labeling_rules: tuple = DEFAULT_LABELING_RULES

    def __post_init__(self) -> None:
        for method, bands in self.vulnerability_table.items():
            if method not in METHOD_QUANTUM_CLASS:
                raise InputError(f"vulnerability_table names unknown method {method!r}")
            for _, value in bands:
                if not (0.0 <= value <= 1.0):
                    raise InputError(f"vulnerability for {method} outside [0,1]: {value}")
        if self.threat_scale_years <= 0:
            raise InputError("threat_scale_years must be positive")
        if self.lifetime_threshold_years < 1:
            raise InputError("lifetime_threshold_years must be >= 1")
        for rule in self.labeling_rules:
            if rule["strategy"] not in STRATEGY_URGENCY:
                raise InputError(f"rule {rule.get('id')} names unknown strategy {rule['strategy']!r}")
            for atom in rule.get("when", ()):
                _check_atom(atom)

    @classmethod
    def from_config(cls, config: dict) -> "RiskParams":
        """Build params from a JSON config document; absent keys keep defaults."""
        table = config.get("vulnerability_table")
        if table is not None:
            table = {
                method: tuple((band[0], float(band[1])) for band in bands)
                for method, bands in table.items()
            }
        rules = config.get("labeling_rules")
        return cls(
            vulnerability_table=table if table is not None else dict(DEFAULT_VULNERABILITY_TABLE),
            sensitivity_divisor=float(config.get("sensitivity_divisor", 5.0)),
            threat_midpoint_years=float(config.get("threat_midpoint_years", 15.0)),
            threat_scale_years=float(config.get("threat_scale_years", 3.0)),
            lifetime_threshold_years=int(config.get("lifetime_threshold_years", 10)),
            labeling_rules=tuple(rules) if rules is not None else DEFAULT_LABELING_RULES,
        )

    @classmethod
    def load(cls, path: str | Path) -> "RiskParams":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_config(json.load(handle))

    def to_config(self) -> dict:
        return {
            "vulnerability_table": {
                method: [[key_max, value] for key_max, value in bands]
                for method, bands in self.vulnerability_table.items()
            },
            "sensitivity_divisor": self.sensitivity_divisor,
            "threat_midpoint_years": self.threat_midpoint_years,
            "threat_scale_years": self.threat_scale_years,
            "lifetime_threshold_years": self.lifetime_threshold_years,
            "labeling_rules": [dict(rule) for rule in self.labeling_rules],
        }


DEFAULT_PARAMS = RiskParams()


@dataclass(frozen=True)
class RiskScore:
    """The three factors and their product."""

    v: float
    s: float
    p: float
    r: float


def _atom_matches(atom: dict, record: SystemRecord, params: RiskParams) -> bool:
    if "any" in atom:
        return any(_atom_matches(sub, record, params) for sub in atom["any"])
    if "quantum_class" in atom:
        return quantum_class(record.crypto_method).value == atom["quantum_class"]
    if "method_in" in atom:
        return record.crypto_method in atom["method_in"]
    if "key_at_most" in atom:
        limit = atom["key_at_most"].get(record.crypto_method)
        return limit is not None and record.key_size <= limit
    if "field_at_least" in atom:
        name, bound = atom["field_at_least"]
        return getattr(record, name) >= bound
    if "field_at_most" in atom:
        name, bound = atom["field_at_most"]
        return getattr(record, name) <= bound
    if "lifetime_exceeds_threshold" in atom:
        exceeds = record.security_lifetime > params.lifetime_threshold_years
        return exceeds == bool(atom["lifetime_exceeds_threshold"])
    raise InputError(f"malformed rule atom {atom!r}")


def match_rule(record: SystemRecord, params: RiskParams = DEFAULT_PARAMS) -> dict:
    """First labeling rule whose conditions all hold for the record."""
    for rule in params.labeling_rules:
        if all(_atom_matches(atom, record, params) for atom in rule.get("when", ())):
            return rule
    raise InputError("labeling rule table is not total; add a fallback rule")


def label_strategy(record: SystemRecord, params: RiskParams = DEFAULT_PARAMS) -> str:
    """Ground-truth strategy for a valid record (its stored label is ignored)."""
    return match_rule(record, params)["strategy"]


def vulnerability(method: str, key_size: int, params: RiskParams = DEFAULT_PARAMS) -> float:
    """Exposure of a method/key-size pair, in [0,1]."""
    valid = VALID_KEY_SIZES.get(method)
    if valid is None:
        raise InputError(f"unknown crypto_method {method!r}", field="crypto_method")
    if key_size not in valid:
        valid_set = "{" + ",".join(str(k) for k in valid) + "}"
        raise InputError(f"key_size not in {valid_set} for {method}", field="key_size")
    for key_max, value in params.vulnerability_table[method]:
        if key_max is None or key_size <= key_max:
            return value
    raise InputError(f"vulnerability_table has no band for {method} key_size={key_size}")


def sensitivity_scale(d: int, params: RiskParams = DEFAULT_PARAMS) -> float:
    """Sensitivity factor d / divisor, strictly increasing on the 1..5 scale."""
    if isinstance(d, bool) or not isinstance(d, int) or not (1 <= d <= 5):
        raise InputError("data_sensitivity out of [1,5]", field="data_sensitivity")
    return d / params.sensitivity_divisor


def threat_probability(t: float, params: RiskParams = DEFAULT_PARAMS) -> float:
    """Logistic probability the threat matures within t years; 0.5 at the midpoint."""
    if t < 0:
        raise InputError("horizon must be >= 0")
    return 1.0 / (1.0 + math.exp(-(t - params.threat_midpoint_years) / params.threat_scale_years))


def risk(record: SystemRecord, horizon: float, params: RiskParams = DEFAULT_PARAMS) -> RiskScore:
    """Composite risk of a valid record over the given horizon in years."""
    require_valid(record)
    v = vulnerability(record.crypto_method, record.key_size, params)
    s = sensitivity_scale(record.data_sensitivity, params)
    p = threat_probability(horizon, params)
    return RiskScore(v=v, s=s, p=p, r=v * s * p)


def urgency_index(strategy: str) -> int:
    """Numeric urgency of a strategy name: 1 (none) through 5 (replace now)."""
    try:
        return STRATEGY_URGENCY[strategy]
    except KeyError:
        raise InputError(f"unknown strategy {strategy!r}", field="recommended_strategy") from None

"""Tests for the declarative mapping engine."""

from __future__ import annotations

import random
import re
from datetime import datetime, timezone

import pytest

from aifseq.classify import (
    Classification,
    MappingError,
    classify_alert,
    classify_stream,
    coverage_report,
    load_mapping,
    starter_mapping_document,
)
from aifseq.ingest import NormalizedAlert, RawRef
from aifseq.taxonomy import builtin_taxonomy

TAX = builtin_taxonomy()


def make_alert(**overrides) -> NormalizedAlert:
    fields = dict(
        timestamp=datetime(2021, 3, 1, 12, 0, 0, tzinfo=timezone.utc),
        src_ip="10.0.0.5",
        src_port=40000,
        dst_ip="192.168.1.20",
        dst_port=80,
        protocol="TCP",
        generator_id=1,
        signature_id=1000001,
        revision=1,
        signature_msg="ET SCAN Nmap TCP probe",
        category="Attempted Information Leak",
        severity=2,
        source_format="eve",
        raw_ref=RawRef("test", 1),
    )
    fields.update(overrides)
    return NormalizedAlert(**fields)


def make_doc(rules, default_confidence=0.5, spec_version="t-1"):
    return {
        "spec_version": spec_version,
        "default_confidence": default_confidence,
        "rules": rules,
    }


def rule(rule_id, match, target, priority=10, confidence=None):
    raw = {"rule_id": rule_id, "priority": priority, "match": match, "target_micro": target}
    if confidence is not None:
        raw["confidence"] = confidence
    return raw


ADMIN_DOC = make_doc(
    [
        rule(
            "r-admin",
            {"category_equals": "Attempted Administrator Privilege Gain"},
            "root_privilege_escalation",
            confidence=0.7,
        )
    ]
)


def test_single_category_rule_assigns_micro_and_macro():
    spec = load_mapping(ADMIN_DOC, TAX)
    alert = make_alert(category="Attempted Administrator Privilege Gain")
    verdict = classify_alert(alert, spec, TAX)
    assert verdict.micro == "root_privilege_escalation"
    assert verdict.macro == "privilege_escalation"
    assert verdict.matched_rule == "r-admin"
    assert verdict.confidence == 0.7
    assert verdict.alert_ref == alert.raw_ref


def test_unmatched_alert_gets_sentinel_with_default_confidence():
    spec = load_mapping(ADMIN_DOC, TAX)
    verdict = classify_alert(make_alert(category="Not Suspicious Traffic"), spec, TAX)
    assert verdict.micro == "unclassified"
    assert verdict.macro == "unclassified"
    assert verdict.matched_rule is None
    assert verdict.confidence == 0.5


def test_higher_priority_rule_wins():
    doc = make_doc(
        [
            rule("r-low", {"category_equals": "X"}, "host_discovery", priority=5),
            rule("r-high", {"category_equals": "X"}, "service_discovery", priority=10),
        ]
    )
    spec = load_mapping(doc, TAX)
    verdict = classify_alert(make_alert(category="X"), spec, TAX)
    assert verdict.micro == "service_discovery"
    assert verdict.matched_rule == "r-high"


def test_predicate_count_breaks_priority_tie():
    doc = make_doc(
        [
            rule("r-one", {"category_equals": "X"}, "host_discovery"),
            rule(
                "r-two",
                {"category_equals": "X", "severity_at_most": 3},
                "service_discovery",
            ),
        ]
    )
    spec = load_mapping(doc, TAX)
    verdict = classify_alert(make_alert(category="X", severity=2), spec, TAX)
    assert verdict.matched_rule == "r-two"


def test_rule_id_breaks_full_tie():
    doc = make_doc(
        [
            rule("r-b", {"category_equals": "X"}, "host_discovery"),
            rule("r-a", {"category_equals": "X"}, "service_discovery"),
        ]
    )
    spec = load_mapping(doc, TAX)
    assert classify_alert(make_alert(category="X"), spec, TAX).matched_rule == "r-a"


def test_explicit_sentinel_target_carries_no_rule_id():
    doc = make_doc(
        [rule("r-noise", {"category_equals": "Misc activity"}, "unclassified", confidence=0.9)]
    )
    spec = load_mapping(doc, TAX)
    verdict = classify_alert(make_alert(category="Misc activity"), spec, TAX)
    assert verdict.micro == "unclassified"
    assert verdict.matched_rule is None
    assert verdict.confidence == 0.9


def test_rule_without_confidence_inherits_default():
    doc = make_doc([rule("r-x", {"category_equals": "X"}, "host_discovery")], default_confidence=0.4)
    spec = load_mapping(doc, TAX)
    assert classify_alert(make_alert(category="X"), spec, TAX).confidence == 0.4


def test_msg_contains_all_is_case_insensitive():
    doc = make_doc([rule("r-m", {"msg_contains_all": ["NMAP", "probe"]}, "host_discovery")])
    spec = load_mapping(doc, TAX)
    verdict = classify_alert(make_alert(signature_msg="et scan nMaP tcp PROBE"), spec, TAX)
    assert verdict.micro == "host_discovery"
    missed = classify_alert(make_alert(signature_msg="et scan masscan"), spec, TAX)
    assert missed.micro == "unclassified"


def test_msg_regex_case_sensitive_unless_opted_out():
    doc = make_doc([rule("r-r", {"msg_regex": r"Nmap \w+ probe"}, "host_discovery")])
    spec = load_mapping(doc, TAX)
    assert classify_alert(make_alert(signature_msg="ET SCAN Nmap TCP probe"), spec, TAX).micro == "host_discovery"
    assert classify_alert(make_alert(signature_msg="et scan nmap tcp probe"), spec, TAX).micro == "unclassified"

    relaxed = make_doc([rule("r-r", {"msg_regex": r"(?i)nmap \w+ probe"}, "host_discovery")])
    spec2 = load_mapping(relaxed, TAX)
    assert classify_alert(make_alert(signature_msg="et scan nmap tcp probe"), spec2, TAX).micro == "host_discovery"


def test_sid_ranges_and_singletons():
    doc = make_doc([rule("r-s", {"sid_in": [100, [2000, 2100]]}, "host_discovery")])
    spec = load_mapping(doc, TAX)
    assert classify_alert(make_alert(signature_id=100), spec, TAX).micro == "host_discovery"
    assert classify_alert(make_alert(signature_id=2050), spec, TAX).micro == "host_discovery"
    assert classify_alert(make_alert(signature_id=2101), spec, TAX).micro == "unclassified"


def test_gid_and_severity_predicates():
    doc = make_doc(
        [rule("r-g", {"gid_equals": 1, "severity_at_most": 2}, "end_point_dos")]
    )
    spec = load_mapping(doc, TAX)
    assert classify_alert(make_alert(severity=1), spec, TAX).micro == "end_point_dos"
    assert classify_alert(make_alert(severity=3), spec, TAX).micro == "unclassified"
    assert classify_alert(make_alert(severity=None), spec, TAX).micro == "unclassified"
    assert classify_alert(make_alert(generator_id=3, severity=1), spec, TAX).micro == "unclassified"


def test_category_equals_is_exact():
    spec = load_mapping(ADMIN_DOC, TAX)
    lower = make_alert(category="attempted administrator privilege gain")
    assert classify_alert(lower, spec, TAX).micro == "unclassified"
    missing = make_alert(category=None)
    assert classify_alert(missing, spec, TAX).micro == "unclassified"


def test_unknown_target_micro_rejected():
    doc = make_doc([rule("r-x", {"category_equals": "X"}, "pwn_everything")])
    with pytest.raises(MappingError, match="pwn_everything"):
        load_mapping(doc, TAX)


def test_macro_key_is_not_a_valid_target():
    doc = make_doc([rule("r-x", {"category_equals": "X"}, "privilege_escalation")])
    with pytest.raises(MappingError, match="unknown target micro"):
        load_mapping(doc, TAX)


def test_duplicate_rule_id_rejected():
    doc = make_doc(
        [
            rule("r1", {"category_equals": "X"}, "host_discovery"),
            rule("r1", {"category_equals": "Y"}, "service_discovery"),
        ]
    )
    with pytest.raises(MappingError, match="duplicate rule_id"):
        load_mapping(doc, TAX)


def test_empty_predicate_set_rejected():
    doc = make_doc([rule("r-x", {}, "host_discovery")])
    with pytest.raises(MappingError, match="at least one predicate"):
        load_mapping(doc, TAX)


def test_invalid_regex_rejected():
    doc = make_doc([rule("r-x", {"msg_regex": "["}, "host_discovery")])
    with pytest.raises(MappingError, match="invalid regex"):
        load_mapping(doc, TAX)


def test_unknown_predicate_rejected():
    doc = make_doc([rule("r-x", {"msg_startswith": "ET"}, "host_discovery")])
    with pytest.raises(MappingError, match="unknown predicate"):
        load_mapping(doc, TAX)


@pytest.mark.parametrize("bad", [0, 1.5, -0.2, "high"])
def test_bad_confidence_rejected(bad):
    doc = make_doc([rule("r-x", {"category_equals": "X"}, "host_discovery", confidence=bad)])
    with pytest.raises(MappingError):
        load_mapping(doc, TAX)


def test_bad_default_confidence_rejected():
    doc = make_doc([rule("r-x", {"category_equals": "X"}, "host_discovery")], default_confidence=0)
    with pytest.raises(MappingError, match="default_confidence"):
        load_mapping(doc, TAX)


def test_bad_sid_range_rejected():
    doc = make_doc([rule("r-x", {"sid_in": [[10, 5]]}, "host_discovery")])
    with pytest.raises(MappingError, match="sid_in"):
        load_mapping(doc, TAX)


def test_error_collects_multiple_findings():
    doc = make_doc(
        [
            rule("r1", {}, "host_discovery"),
            rule("r2", {"category_equals": "X"}, "nope"),
            rule("r1", {"category_equals": "Y"}, "host_discovery"),
        ]
    )
    with pytest.raises(MappingError) as info:
        load_mapping(doc, TAX)
    assert len(info.value.findings) == 2  # empty match, unknown target; dup id r1 never re-registered
    joined = " ".join(info.value.findings)
    assert "at least one predicate" in joined and "nope" in joined


def test_duplicate_detection_counts_parsed_rules():
    doc = make_doc(
        [
            rule("r1", {"category_equals": "X"}, "host_discovery"),
            rule("r1", {"category_equals": "Y"}, "service_discovery"),
            rule("r1", {"category_equals": "Z"}, "surfing"),
        ]
    )
    with pytest.raises(MappingError) as info:
        load_mapping(doc, TAX)
    assert sum("duplicate" in f for f in info.value.findings) == 2


def test_classify_stream_is_order_preserving_and_total():
    spec = load_mapping(ADMIN_DOC, TAX)
    alerts = [
        make_alert(category="Attempted Administrator Privilege Gain", signature_id=1),
        make_alert(category="nope", signature_id=2),
        make_alert(category="Attempted Administrator Privilege Gain", signature_id=3),
    ]
    pairs = list(classify_stream(alerts, spec, TAX))
    assert [a.signature_id for a, _ in pairs] == [1, 2, 3]
    assert [c.micro for _, c in pairs] == [
        "root_privilege_escalation",
        "unclassified",
        "root_privilege_escalation",
    ]
    assert list(classify_stream([], spec, TAX)) == []


def test_coverage_report_counts():
    spec = load_mapping(ADMIN_DOC, TAX)
    alerts = [make_alert(category="Attempted Administrator Privilege Gain")] * 6 + [
        make_alert(category="nope")
    ] * 4
    verdicts = [c for _, c in classify_stream(alerts, spec, TAX)]
    report = coverage_report(spec, verdicts)
    assert report.total == 10
    assert report.unclassified_fraction == 0.4
    assert report.rule_hits == {"r-admin": 6}
    assert report.micro_counts == {"root_privilege_escalation": 6, "unclassified": 4}
    assert report.macro_counts == {"privilege_escalation": 6, "unclassified": 4}


def test_coverage_report_empty_input():
    spec = load_mapping(ADMIN_DOC, TAX)
    report = coverage_report(spec, [])
    assert report.total == 0
    assert report.unclassified_fraction == 0.0
    assert report.rule_hits == {"r-admin": 0}
    assert report.micro_counts == {} and report.macro_counts == {}


def test_starter_mapping_loads_and_covers_known_classtypes():
    spec = load_mapping(starter_mapping_document(), TAX)
    assert spec.spec_version == "starter-1.0.0"
    scan = make_alert(category="Detection of a Network Scan", signature_msg="scan")
    assert classify_alert(scan, spec, TAX).micro == "host_discovery"
    admin = make_alert(category="Attempted Administrator Privilege Gain", signature_msg="x")
    assert classify_alert(admin, spec, TAX).micro == "root_privilege_escalation"
    dos = make_alert(category="Attempted Denial of Service", signature_msg="flood")
    verdict = classify_alert(dos, spec, TAX)
    assert (verdict.micro, verdict.macro) == ("end_point_dos", "disrupt")


def test_starter_mapping_msg_rule_outranks_category_rule():
    spec = load_mapping(starter_mapping_document(), TAX)
    alert = make_alert(
        category="Potentially Bad Traffic",
        signature_msg="GPL ATTACK_RESPONSE id check returned root",
    )
    verdict = classify_alert(alert, spec, TAX)
    assert verdict.micro == "root_privilege_escalation"
    assert verdict.matched_rule == "msg-id-check-root"
    assert verdict.confidence == 0.95


def test_starter_mapping_returns_fresh_copies():
    doc = starter_mapping_document()
    doc["rules"].clear()
    assert starter_mapping_document()["rules"]


# Randomized determinism checks; the acceptance suite runs the large loop.

CATEGORIES = ["Alpha", "Beta", "Gamma", None]
TOKENS = ["scan", "probe", "root", "login", "flood", "beacon"]
MICROS = [
    "host_discovery",
    "service_discovery",
    "root_privilege_escalation",
    "end_point_dos",
    "data_exfiltration",
    "unclassified",
]


def random_rule(rng: random.Random, rule_id: str) -> dict:
    match = {}
    if rng.random() < 0.5:
        match["category_equals"] = rng.choice([c for c in CATEGORIES if c])
    if rng.random() < 0.5:
        match["msg_contains_all"] = rng.sample(TOKENS, rng.randint(1, 2))
    if rng.random() < 0.3:
        match["msg_regex"] = rng.choice(TOKENS) + r"\b"
    if rng.random() < 0.4:
        lo = rng.randint(1, 50)
        match["sid_in"] = [[lo, lo + rng.randint(0, 20)]]
    if rng.random() < 0.2:
        match["gid_equals"] = rng.randint(1, 2)
    if rng.random() < 0.3:
        match["severity_at_most"] = rng.randint(1, 4)
    if not match:
        match["category_equals"] = rng.choice([c for c in CATEGORIES if c])
    return rule(
        rule_id,
        match,
        rng.choice(MICROS),
        priority=rng.randint(0, 5),
        confidence=round(rng.uniform(0.1, 1.0), 2),
    )


def random_alert(rng: random.Random) -> NormalizedAlert:
    return make_alert(
        category=rng.choice(CATEGORIES),
        signature_msg=" ".join(rng.sample(TOKENS, rng.randint(1, 4))),
        signature_id=rng.randint(1, 80),
        generator_id=rng.randint(1, 2),
        severity=rng.choice([None, 1, 2, 3, 4]),
    )


def oracle_verdict(alert, spec, taxonomy) -> tuple[str, str | None]:
    # Evaluate every rule independently, then apply the tie-break chain.
    msg_lower = alert.signature_msg.lower()
    matching = [r for r in spec.rules if r.matches(alert, msg_lower)]
    if not matching:
        return "unclassified", None
    best = sorted(matching, key=lambda r: (-r.priority, -r.predicate_count, r.rule_id))[0]
    micro = best.target_micro
    return micro, best.rule_id if micro != "unclassified" else None


def test_random_specs_match_oracle_and_survive_shuffling():
    rng = random.Random(20240812)
    for _ in range(200):
        n_rules = rng.randint(1, 8)
        raw_rules = [random_rule(rng, f"r{i:02d}") for i in range(n_rules)]
        doc = make_doc(raw_rules)
        spec = load_mapping(doc, TAX)
        alert = random_alert(rng)
        verdict = classify_alert(alert, spec, TAX)
        assert (verdict.micro, verdict.matched_rule) == oracle_verdict(alert, spec, TAX)
        assert verdict.macro == TAX.macro_of(verdict.micro)

        shuffled = list(raw_rules)
        rng.shuffle(shuffled)
        spec2 = load_mapping(make_doc(shuffled), TAX)
        verdict2 = classify_alert(alert, spec2, TAX)
        assert (verdict2.micro, verdict2.macro, verdict2.matched_rule, verdict2.confidence) == (
            verdict.micro,
            verdict.macro,
            verdict.matched_rule,
            verdict.confidence,
        )


def test_adding_non_matching_rule_never_changes_verdicts():
    rng = random.Random(7)
    doc = make_doc([random_rule(rng, f"r{i}") for i in range(4)])
    spec = load_mapping(doc, TAX)
    alerts = [random_alert(rng) for _ in range(30)]
    before = [classify_alert(a, spec, TAX) for a in alerts]

    never_matches = rule(
        "zz-never", {"category_equals": "No Such Category Ever"}, "surfing", priority=99
    )
    spec2 = load_mapping(make_doc(doc["rules"] + [never_matches]), TAX)
    after = [classify_alert(a, spec2, TAX) for a in alerts]
    assert [(c.micro, c.matched_rule) for c in before] == [
        (c.micro, c.matched_rule) for c in after
    ]

import json
import logging

import numpy as np
import pytest
from pydantic import ValidationError

from models.errors import RegisterError
from models.risk import (
    FrequencyClass,
    Mitigation,
    OccurrenceRate,
    Probability,
    RiskKind,
    RiskRegister,
    RiskType,
    ViolationCode,
)
from services.risk_register import (
    apply_mitigation,
    classify_type,
    load_register,
    parse_register,
    read_register_text,
    serialize_register,
    typical_frequency,
    validate_register_document,
    validate_risk,
)
from tests.conftest import make_risk, random_register


def register_doc(*risks, **extra):
    doc = {"project": "Test Project", "risks": list(risks)}
    doc.update(extra)
    return json.dumps(doc, indent=2)


def risk_entry(**overrides):
    entry = {"id": "R1", "title": "Slip", "type": "Schedule", "probability": 40, "frequency": "Likely"}
    entry.update(overrides)
    return entry


# ============================================================================
# PROBABILITY / FREQUENCY / TYPES
# ============================================================================

@pytest.mark.parametrize("percent", [0, 100, -5, 100.5])
def test_probability_rejects_closed_bounds(percent):
    with pytest.raises(ValidationError, match="0 < x < 100"):
        Probability(percent=percent)


def test_probability_sweep_1_to_99_accepted():
    for percent in range(1, 100):
        assert Probability(percent=percent).fraction == percent / 100


def test_frequency_order_and_labels():
    assert FrequencyClass.UNLIKELY < FrequencyClass.SELDOM < FrequencyClass.OCCASIONAL
    assert FrequencyClass.OCCASIONAL < FrequencyClass.LIKELY < FrequencyClass.FREQUENT
    assert FrequencyClass.from_label("  frequent ") == FrequencyClass.FREQUENT
    assert FrequencyClass.OCCASIONAL.description == "Occurs sporadically."
    with pytest.raises(ValueError, match="unknown frequency"):
        FrequencyClass.from_label("sometimes")


def test_occurrence_rate_nonnegative():
    assert str(OccurrenceRate(count=7, period="hour")) == "7/hour"
    with pytest.raises(ValidationError):
        OccurrenceRate(count=-1, period="hour")


@pytest.mark.parametrize("label,kind", [
    ("schedule risk", RiskKind.SCHEDULE),
    ("SCOPE", RiskKind.SCOPE),
    ("Technology Risk", RiskKind.TECHNOLOGY),
    ("cost", RiskKind.COST),
    ("organizational", RiskKind.ORGANIZATIONAL),
])
def test_classify_type_table_names(label, kind):
    assert classify_type(label).kind == kind


def test_classify_type_custom_and_empty():
    custom = classify_type("vendor lock-in")
    assert custom.kind == RiskKind.CUSTOM
    assert custom.label == "vendor lock-in"
    # synonyms exist only for technology/cost/schedule
    assert classify_type("people risk").kind == RiskKind.CUSTOM
    with pytest.raises(ValueError):
        classify_type("   ")


@pytest.mark.parametrize("label", ["schedule risk", "SCOPE", "vendor lock-in", "Tools", "cost risk"])
def test_classify_type_is_idempotent(label):
    once = classify_type(label)
    assert classify_type(once.name) == once


def test_risk_type_weight_bounds():
    assert RiskType(kind=RiskKind.COST, severity_weight=1.0).severity_weight == 1.0
    for weight in (0, -0.1, 1.01):
        with pytest.raises(ValidationError):
            RiskType(kind=RiskKind.COST, severity_weight=weight)
    with pytest.raises(ValidationError):
        RiskType(kind=RiskKind.CUSTOM, label="")


def test_typical_frequency_table():
    assert typical_frequency(RiskKind.REQUIREMENTS) == FrequencyClass.FREQUENT
    assert typical_frequency(RiskKind.SCHEDULE) == FrequencyClass.LIKELY
    assert typical_frequency(RiskKind.PEOPLE) == FrequencyClass.OCCASIONAL
    assert typical_frequency(RiskKind.TECHNOLOGY) == FrequencyClass.SELDOM
    assert typical_frequency(RiskKind.ORGANIZATIONAL) == FrequencyClass.UNLIKELY
    assert typical_frequency(RiskKind.COST) is None


# ============================================================================
# VALIDATION
# ============================================================================

def test_validate_risk_valid_fields():
    assert validate_risk({"probability": 50, "frequency": "Occasional"}) == []
    assert validate_risk(make_risk()) == []


def test_validate_risk_certainty_and_non_occurrence():
    [certainty] = validate_risk({"probability": 100})
    assert certainty.code == ViolationCode.PROBABILITY_CERTAINTY
    assert "0 < x < 100" in certainty.message
    [never] = validate_risk({"probability": 0})
    assert never.code == ViolationCode.PROBABILITY_NON_OCCURRENCE


def test_validate_risk_empty_id():
    assert [v.code for v in validate_risk({"id": ""})] == [ViolationCode.EMPTY_ID]


def test_validate_risk_reports_every_violation():
    violations = validate_risk({
        "id": "two words",
        "type": "",
        "probability": "high",
        "frequency": "sometimes",
        "mitigation": {"post_frequency": "Seldom"},
    }, path="risks[0]")
    codes = [v.code for v in violations]
    assert codes == [
        ViolationCode.EMPTY_ID,
        ViolationCode.EMPTY_TYPE,
        ViolationCode.PROBABILITY_NOT_NUMBER,
        ViolationCode.UNKNOWN_FREQUENCY,
        ViolationCode.INVALID_MITIGATION,
    ]
    assert violations[2].field == "risks[0].probability"


def test_validate_risk_randomized_fields():
    rng = np.random.default_rng(7)
    for _ in range(300):
        probability = float(rng.uniform(-20, 120))
        frequency = ["Unlikely", "Seldom", "Occasional", "Likely", "Frequent", "Often"][int(rng.integers(6))]
        risk_id = ["R1", "", "A B"][int(rng.integers(3))]
        entry = {"id": risk_id, "type": "Cost", "probability": probability, "frequency": frequency}
        admissible = 0 < probability < 100 and frequency != "Often" and risk_id == "R1"
        assert (validate_risk(entry) == []) == admissible


# ============================================================================
# PARSING
# ============================================================================

def test_parse_minimal_register():
    register = parse_register(register_doc(risk_entry()))
    assert register.project_name == "Test Project"
    [risk] = register.risks
    assert risk.id == "R1"
    assert risk.risk_type.kind == RiskKind.SCHEDULE
    assert risk.probability.percent == 40
    assert risk.frequency == FrequencyClass.LIKELY


@pytest.mark.parametrize("percent", [100, 0])
def test_parse_rejects_probability_bounds(percent):
    with pytest.raises(RegisterError, match="probability must satisfy 0 < x < 100") as excinfo:
        parse_register(register_doc(risk_entry(probability=percent)))
    assert excinfo.value.field == "risks[0].probability"


def test_parse_syntax_error_reports_line():
    with pytest.raises(RegisterError) as excinfo:
        parse_register('{\n  "project": "x",\n  "risks": [\n    {"id": }\n  ]\n}')
    assert excinfo.value.code == "SyntaxError"
    assert excinfo.value.line == 4
    assert "line 4" in str(excinfo.value)


def test_parse_duplicate_id():
    with pytest.raises(RegisterError) as excinfo:
        parse_register(register_doc(risk_entry(), risk_entry(title="again")))
    assert excinfo.value.code == "DuplicateId"


def test_parse_unknown_frequency():
    with pytest.raises(RegisterError) as excinfo:
        parse_register(register_doc(risk_entry(frequency="Weekly")))
    assert excinfo.value.code == "UnknownFrequency"


def test_parse_preserves_order(sample_register_text):
    register = parse_register(sample_register_text)
    assert register.ids == ("R1", "R2", "R3", "R4")
    assert register.get("R2").risk_type.kind == RiskKind.SCHEDULE
    assert register.get("R3").risk_type.severity_weight == 0.8
    assert register.get("R4").risk_type.label == "vendor lock-in"
    assert register.get("R1").phase == "Construction"


def test_strict_mode_rejects_unknown_keys():
    with pytest.raises(RegisterError) as excinfo:
        parse_register(register_doc(risk_entry(owner="pm")), lenient=False)
    assert excinfo.value.code == "UnknownKey"
    assert excinfo.value.field == "risks[0].owner"


def test_lenient_mode_ignores_unknown_keys_and_fills_frequency(caplog):
    entry = risk_entry(owner="pm", type="Requirements")
    del entry["frequency"]
    del entry["title"]
    with caplog.at_level(logging.WARNING):
        register = parse_register(register_doc(entry, owner="x"), lenient=True)
    [risk] = register.risks
    assert risk.frequency == FrequencyClass.FREQUENT
    assert risk.title == ""
    assert "typical Frequent" in caplog.text


def test_lenient_mode_without_typical_frequency_still_fails():
    entry = risk_entry(type="Cost")
    del entry["frequency"]
    with pytest.raises(RegisterError) as excinfo:
        parse_register(register_doc(entry), lenient=True)
    assert excinfo.value.code == "MissingField"


def test_custom_labels_fold_case_insensitively():
    register = parse_register(register_doc(
        risk_entry(id="R1", type="Vendor Lock-in"),
        risk_entry(id="R2", type="vendor lock-in"),
        type_weights={"VENDOR LOCK-IN": 0.5},
    ))
    labels = {risk.risk_type.label for risk in register.risks}
    assert labels == {"VENDOR LOCK-IN"}
    assert all(risk.risk_type.severity_weight == 0.5 for risk in register.risks)


def test_invalid_type_weight():
    with pytest.raises(RegisterError) as excinfo:
        parse_register(register_doc(risk_entry(), type_weights={"Schedule": 1.5}))
    assert excinfo.value.code == "InvalidSeverityWeight"


def test_validate_register_document_collects_all(sample_register_text):
    assert validate_register_document(sample_register_text) == []
    issues = validate_register_document(register_doc(
        risk_entry(id="R1", probability=100),
        risk_entry(id="R2", probability=0),
        risk_entry(id="R2"),
    ))
    assert [(i.index, i.risk_id, i.violation.code) for i in issues] == [
        (0, "R1", ViolationCode.PROBABILITY_CERTAINTY),
        (1, "R2", ViolationCode.PROBABILITY_NON_OCCURRENCE),
        (2, "R2", ViolationCode.DUPLICATE_ID),
    ]


def test_register_model_rejects_duplicates():
    with pytest.raises(ValidationError):
        RiskRegister(project_name="x", risks=(make_risk("R1"), make_risk("R1")))


# ============================================================================
# ROUND TRIP
# ============================================================================

def test_round_trip_fixtures(sample_register_text, timer_register_text):
    for text in (sample_register_text, timer_register_text):
        register = parse_register(text)
        assert parse_register(serialize_register(register)) == register


def test_round_trip_randomized():
    rng = np.random.default_rng(11)
    for _ in range(100):
        register = random_register(rng, max_risks=20)
        text = serialize_register(register)
        assert parse_register(text) == register
        assert serialize_register(parse_register(text)) == text


# ============================================================================
# MITIGATION
# ============================================================================

def test_timer_mitigation_rates(timer_register_text):
    [timer] = parse_register(timer_register_text).risks
    plan = Mitigation(
        description="Watchdog restarts the timer task",
        post_frequency=FrequencyClass.SELDOM,
        post_rate=OccurrenceRate(count=2, period="hour"),
    )
    mitigated = apply_mitigation(timer.model_copy(update={"mitigation": None}), plan)
    assert mitigated.observed_rate == OccurrenceRate(count=7, period="hour")
    assert mitigated.mitigation.post_rate == OccurrenceRate(count=2, period="hour")
    assert not mitigated.mitigation_regressed


def test_apply_mitigation_identity_no_warning(caplog):
    risk = make_risk(frequency=FrequencyClass.FREQUENT)
    with caplog.at_level(logging.WARNING):
        mitigated = apply_mitigation(risk, Mitigation(description="x", post_frequency=FrequencyClass.FREQUENT))
    assert mitigated.mitigation.post_frequency == FrequencyClass.FREQUENT
    assert not mitigated.mitigation_regressed
    assert caplog.text == ""


def test_apply_mitigation_regression_flagged(caplog):
    risk = make_risk(frequency=FrequencyClass.SELDOM)
    with caplog.at_level(logging.WARNING):
        mitigated = apply_mitigation(risk, Mitigation(description="x", post_frequency=FrequencyClass.LIKELY))
    assert mitigated.mitigation_regressed
    assert "raises frequency Seldom -> Likely" in caplog.text


def test_apply_mitigation_keeps_identity_fields():
    risk = make_risk("R9", probability=35, frequency=FrequencyClass.LIKELY, type_label="Tools")
    mitigated = apply_mitigation(risk, Mitigation(description="x", post_frequency=FrequencyClass.UNLIKELY))
    assert mitigated.id == risk.id
    assert mitigated.risk_type == risk.risk_type
    assert mitigated.probability == risk.probability
    assert mitigated.frequency == risk.frequency
    assert risk.mitigation is None


def test_non_utf8_register_file(tmp_path):
    path = tmp_path / "register.json"
    path.write_bytes(b'{"project": "\xff", "risks": []}')
    with pytest.raises(RegisterError) as excinfo:
        load_register(path)
    assert excinfo.value.code == "EncodingError"
    with pytest.raises(RegisterError):
        read_register_text(path)

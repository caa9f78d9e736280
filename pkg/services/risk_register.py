# services/risk_register.py
"""
Risk Register Service
Parses, validates and maintains the project risk register (JSON file format).
"""
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Tuple, Union
import logging

from config.settings import settings
from models.errors import RegisterError
from models.risk import (
    FrequencyClass,
    Mitigation,
    OccurrenceRate,
    Probability,
    PROBABILITY_BOUND_MESSAGE,
    Risk,
    RiskKind,
    RiskRegister,
    RiskType,
    Violation,
    ViolationCode,
)

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = ('project', 'type_weights', 'risks', 'factors', 'edges')
RISK_KEYS = ('id', 'title', 'type', 'probability', 'frequency', 'observed_rate', 'mitigation', 'phase')
REQUIRED_RISK_KEYS = ('id', 'title', 'type', 'probability', 'frequency')
MITIGATION_KEYS = ('description', 'post_frequency', 'post_rate')
RATE_KEYS = ('count', 'period')

# Bare and "X Risk" spellings both appear in the coarse type table
TYPE_SYNONYMS: Dict[str, RiskKind] = {
    'technology risk': RiskKind.TECHNOLOGY,
    'cost risk': RiskKind.COST,
    'schedule risk': RiskKind.SCHEDULE,
}

# "Probable frequency" per coarse type, used only to fill gaps in lenient mode
TYPICAL_FREQUENCY: Dict[RiskKind, FrequencyClass] = {
    RiskKind.REQUIREMENTS: FrequencyClass.FREQUENT,
    RiskKind.SCHEDULE: FrequencyClass.LIKELY,
    RiskKind.PEOPLE: FrequencyClass.OCCASIONAL,
    RiskKind.TECHNOLOGY: FrequencyClass.SELDOM,
    RiskKind.ORGANIZATIONAL: FrequencyClass.UNLIKELY,
}


class RegisterIssue(NamedTuple):
    """A violation located in a register document"""
    index: Optional[int]  # None for document-level problems
    risk_id: Optional[str]
    violation: Violation


# ============================================================================
# TYPES AND FREQUENCIES
# ============================================================================

def classify_type(label: str, severity_weight: float = 1.0) -> RiskType:
    """
    Map a free-text label onto a risk type.

    Matching is case-insensitive against the built-in kind names plus the
    "technology/cost/schedule risk" synonyms; anything else becomes Custom(label).
    """
    if not isinstance(label, str) or not label.strip():
        raise ValueError("risk type label must be nonempty")

    normalized = ' '.join(label.split())
    key = normalized.casefold()
    if key in TYPE_SYNONYMS:
        return RiskType(kind=TYPE_SYNONYMS[key], severity_weight=severity_weight)

    for kind in RiskKind:
        if kind != RiskKind.CUSTOM and kind.value.casefold() == key:
            return RiskType(kind=kind, severity_weight=severity_weight)

    return RiskType(kind=RiskKind.CUSTOM, label=normalized, severity_weight=severity_weight)


def typical_frequency(kind: RiskKind) -> Optional[FrequencyClass]:
    """Typical frequency class for a coarse risk type, if the sample table lists one"""
    return TYPICAL_FREQUENCY.get(kind)


class _TypeResolver:
    """Resolves type labels within one register: weights and custom-label folding"""

    def __init__(self):
        self.weights: Dict[str, float] = {}
        self._custom_spellings: Dict[str, str] = {}

    def canonical_name(self, label: str) -> str:
        risk_type = classify_type(label)
        if not risk_type.is_custom:
            return risk_type.name
        folded = risk_type.label.casefold()
        return self._custom_spellings.setdefault(folded, risk_type.label)

    def resolve(self, label: str) -> RiskType:
        name = self.canonical_name(label)
        weight = self.weights.get(name, 1.0)
        return classify_type(name, severity_weight=weight)


# ============================================================================
# VALIDATION
# ============================================================================

def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_rate(value: Any, field: str) -> List[Violation]:
    if isinstance(value, OccurrenceRate):
        return []
    if not isinstance(value, Mapping):
        return [Violation(code=ViolationCode.INVALID_RATE, message="rate must be an object {count, period}", field=field)]
    count = value.get('count')
    period = value.get('period')
    if not _is_number(count) or not math.isfinite(count) or count < 0:
        return [Violation(code=ViolationCode.INVALID_RATE, message=f"rate count must be a number >= 0 (got {count!r})", field=f"{field}.count")]
    if not isinstance(period, str) or not period.strip():
        return [Violation(code=ViolationCode.INVALID_RATE, message="rate period must be a nonempty string", field=f"{field}.period")]
    return []


def _check_frequency(value: Any, field: str) -> List[Violation]:
    if isinstance(value, FrequencyClass):
        return []
    try:
        FrequencyClass.from_label(value)
    except ValueError as e:
        return [Violation(code=ViolationCode.UNKNOWN_FREQUENCY, message=str(e), field=field)]
    return []


def _check_probability(value: Any, field: str) -> List[Violation]:
    if isinstance(value, Probability):
        value = value.percent
    if not _is_number(value) or math.isnan(value):
        return [Violation(code=ViolationCode.PROBABILITY_NOT_NUMBER, message=f"probability must be a number (got {value!r})", field=field)]
    if value <= 0:
        return [Violation(
            code=ViolationCode.PROBABILITY_NON_OCCURRENCE,
            message=f"{PROBABILITY_BOUND_MESSAGE}; {value:g}% means the risk never occurs",
            field=field,
        )]
    if value >= 100:
        return [Violation(
            code=ViolationCode.PROBABILITY_CERTAINTY,
            message=f"{PROBABILITY_BOUND_MESSAGE}; {value:g}% is a certainty (a defect), not a risk",
            field=field,
        )]
    return []


def _check_mitigation(value: Any, field: str) -> List[Violation]:
    if isinstance(value, Mitigation):
        return []
    if not isinstance(value, Mapping):
        return [Violation(code=ViolationCode.INVALID_MITIGATION, message="mitigation must be an object", field=field)]
    violations = []
    if not isinstance(value.get('description'), str):
        violations.append(Violation(
            code=ViolationCode.INVALID_MITIGATION,
            message="mitigation needs a description string",
            field=f"{field}.description",
        ))
    if 'post_frequency' not in value:
        violations.append(Violation(
            code=ViolationCode.INVALID_MITIGATION,
            message="mitigation needs a post_frequency",
            field=f"{field}.post_frequency",
        ))
    else:
        violations.extend(_check_frequency(value['post_frequency'], f"{field}.post_frequency"))
    if value.get('post_rate') is not None:
        violations.extend(_check_rate(value['post_rate'], f"{field}.post_rate"))
    return violations


def risk_to_document(risk: Risk) -> Dict[str, Any]:
    """File representation of one risk (keys in documented order)"""
    doc: Dict[str, Any] = {
        'id': risk.id,
        'title': risk.title,
        'type': risk.risk_type.name,
        'probability': risk.probability.percent,
        'frequency': risk.frequency.label,
    }
    if risk.observed_rate is not None:
        doc['observed_rate'] = {'count': risk.observed_rate.count, 'period': risk.observed_rate.period}
    if risk.mitigation is not None:
        mitigation: Dict[str, Any] = {
            'description': risk.mitigation.description,
            'post_frequency': risk.mitigation.post_frequency.label,
        }
        if risk.mitigation.post_rate is not None:
            mitigation['post_rate'] = {
                'count': risk.mitigation.post_rate.count,
                'period': risk.mitigation.post_rate.period,
            }
        doc['mitigation'] = mitigation
    if risk.phase is not None:
        doc['phase'] = risk.phase
    return doc


def validate_risk(risk: Union[Risk, Mapping[str, Any]], path: str = "") -> List[Violation]:
    """
    Check every field invariant of a risk.

    Accepts a Risk or a raw mapping in file format; only fields that are present
    are checked (missing fields are a document concern, see parse_register).
    Returns an empty list iff the risk is admissible for assessment.
    """
    if isinstance(risk, Risk):
        violations = validate_risk(risk_to_document(risk), path)
        weight = risk.risk_type.severity_weight
        if not (0 < weight <= 1):
            violations.append(Violation(
                code=ViolationCode.INVALID_SEVERITY_WEIGHT,
                message=f"severity weight must be in (0, 1] (got {weight!r})",
                field=_join(path, 'type'),
            ))
        return violations

    if not isinstance(risk, Mapping):
        return [Violation(code=ViolationCode.MISSING_FIELD, message="risk entry must be an object", field=path or None)]

    violations: List[Violation] = []

    if 'id' in risk:
        risk_id = risk['id']
        if not isinstance(risk_id, str) or not risk_id.strip() or len(risk_id.split()) != 1:
            violations.append(Violation(
                code=ViolationCode.EMPTY_ID,
                message="id must be a nonempty token without whitespace",
                field=_join(path, 'id'),
            ))

    if 'title' in risk and not isinstance(risk['title'], str):
        violations.append(Violation(code=ViolationCode.MISSING_FIELD, message="title must be a string", field=_join(path, 'title')))

    if 'type' in risk:
        label = risk['type']
        if isinstance(label, RiskType):
            pass
        elif not isinstance(label, str) or not label.strip():
            violations.append(Violation(code=ViolationCode.EMPTY_TYPE, message="type must be a nonempty label", field=_join(path, 'type')))

    if 'probability' in risk:
        violations.extend(_check_probability(risk['probability'], _join(path, 'probability')))

    if 'frequency' in risk:
        violations.extend(_check_frequency(risk['frequency'], _join(path, 'frequency')))

    if risk.get('observed_rate') is not None:
        violations.extend(_check_rate(risk['observed_rate'], _join(path, 'observed_rate')))

    if risk.get('mitigation') is not None:
        violations.extend(_check_mitigation(risk['mitigation'], _join(path, 'mitigation')))

    if risk.get('phase') is not None and not isinstance(risk['phase'], str):
        violations.append(Violation(code=ViolationCode.MISSING_FIELD, message="phase must be a string", field=_join(path, 'phase')))

    return violations


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


# ============================================================================
# PARSING
# ============================================================================

def _load_json(text: str) -> Dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise RegisterError(e.msg, code="SyntaxError", line=e.lineno, column=e.colno)
    if not isinstance(doc, dict):
        raise RegisterError("register must be a JSON object", code="SyntaxError", line=1, column=1)
    return doc


def _unknown_keys(entry: Mapping[str, Any], allowed: Tuple[str, ...], path: str) -> List[Violation]:
    return [
        Violation(code=ViolationCode.UNKNOWN_KEY, message=f"unknown key '{key}'", field=_join(path, key))
        for key in entry
        if key not in allowed
    ]


def _repair_entry(entry: Dict[str, Any], path: str) -> Dict[str, Any]:
    """Lenient-mode repairs: default title, typical frequency for known types"""
    entry = dict(entry)
    if 'title' not in entry:
        entry['title'] = ""
    if 'frequency' not in entry and isinstance(entry.get('type'), str) and entry['type'].strip():
        kind = classify_type(entry['type']).kind
        typical = typical_frequency(kind)
        if typical is not None:
            logger.warning(f"{path}: no frequency given, using typical {typical.label} for {kind.value}")
            entry['frequency'] = typical.label
    return entry


def _walk_document(
    doc: Dict[str, Any],
    lenient: bool,
) -> Tuple[List[RegisterIssue], List[Dict[str, Any]], _TypeResolver]:
    """Check a loaded document; returns issues, repaired risk entries and the type resolver"""
    issues: List[RegisterIssue] = []
    resolver = _TypeResolver()

    def doc_issue(code: ViolationCode, message: str, field: str) -> None:
        issues.append(RegisterIssue(None, None, Violation(code=code, message=message, field=field)))

    for violation in _unknown_keys(doc, TOP_LEVEL_KEYS, ""):
        if lenient:
            logger.warning(f"ignoring {violation.message}")
        else:
            issues.append(RegisterIssue(None, None, violation))

    if not isinstance(doc.get('project'), str):
        doc_issue(ViolationCode.MISSING_FIELD, "project name (string) is required", 'project')

    weights = doc.get('type_weights') or {}
    if not isinstance(weights, Mapping):
        doc_issue(ViolationCode.INVALID_SEVERITY_WEIGHT, "type_weights must be an object", 'type_weights')
        weights = {}
    for label, weight in weights.items():
        field = f"type_weights.{label}"
        if not isinstance(label, str) or not label.strip():
            doc_issue(ViolationCode.EMPTY_TYPE, "type label must be nonempty", field)
            continue
        if not _is_number(weight) or not (0 < weight <= 1):
            doc_issue(ViolationCode.INVALID_SEVERITY_WEIGHT, f"severity weight must be in (0, 1] (got {weight!r})", field)
            continue
        resolver.weights[resolver.canonical_name(label)] = float(weight)

    risks = doc.get('risks', [])
    if not isinstance(risks, list):
        doc_issue(ViolationCode.MISSING_FIELD, "risks must be an array", 'risks')
        risks = []

    entries: List[Dict[str, Any]] = []
    seen_ids = set()
    for i, entry in enumerate(risks):
        path = f"risks[{i}]"
        if not isinstance(entry, dict):
            issues.append(RegisterIssue(i, None, Violation(
                code=ViolationCode.MISSING_FIELD, message="risk entry must be an object", field=path,
            )))
            continue

        risk_id = entry.get('id') if isinstance(entry.get('id'), str) else None
        entry_issues: List[Violation] = []

        unknown = _unknown_keys(entry, RISK_KEYS, path)
        if isinstance(entry.get('observed_rate'), Mapping):
            unknown += _unknown_keys(entry['observed_rate'], RATE_KEYS, f"{path}.observed_rate")
        if isinstance(entry.get('mitigation'), Mapping):
            plan = entry['mitigation']
            unknown += _unknown_keys(plan, MITIGATION_KEYS, f"{path}.mitigation")
            if isinstance(plan.get('post_rate'), Mapping):
                unknown += _unknown_keys(plan['post_rate'], RATE_KEYS, f"{path}.mitigation.post_rate")
        if lenient:
            for violation in unknown:
                logger.warning(f"ignoring {violation.field}: {violation.message}")
            entry = _repair_entry(entry, path)
        else:
            entry_issues.extend(unknown)

        for key in REQUIRED_RISK_KEYS:
            if key not in entry:
                entry_issues.append(Violation(
                    code=ViolationCode.MISSING_FIELD, message=f"missing required key '{key}'", field=_join(path, key),
                ))

        entry_issues.extend(validate_risk(entry, path))

        if risk_id is not None and risk_id in seen_ids:
            entry_issues.append(Violation(
                code=ViolationCode.DUPLICATE_ID, message=f"duplicate risk id '{risk_id}'", field=_join(path, 'id'),
            ))
        if risk_id is not None:
            seen_ids.add(risk_id)

        issues.extend(RegisterIssue(i, risk_id, v) for v in entry_issues)
        if not entry_issues:
            entries.append(entry)

    return issues, entries, resolver


def _build_risk(entry: Mapping[str, Any], resolver: _TypeResolver) -> Risk:
    def rate(value):
        if value is None:
            return None
        return OccurrenceRate(count=value['count'], period=value['period'].strip())

    mitigation = None
    if entry.get('mitigation') is not None:
        plan = entry['mitigation']
        mitigation = Mitigation(
            description=plan['description'],
            post_frequency=FrequencyClass.from_label(plan['post_frequency']),
            post_rate=rate(plan.get('post_rate')),
        )

    return Risk(
        id=entry['id'],
        title=entry['title'],
        risk_type=resolver.resolve(entry['type']),
        probability=Probability(percent=entry['probability']),
        frequency=FrequencyClass.from_label(entry['frequency']),
        observed_rate=rate(entry.get('observed_rate')),
        mitigation=mitigation,
        phase=entry.get('phase'),
    )


def _resolve_lenient(lenient: Optional[bool]) -> bool:
    return (not settings.STRICT_REGISTER) if lenient is None else lenient


def parse_register(text: str, lenient: Optional[bool] = None) -> RiskRegister:
    """
    Parse register file content into a RiskRegister.

    Raises RegisterError for JSON syntax errors (with line/column) and for the
    first violation found (with its code and field path). Risk order is preserved.
    """
    lenient = _resolve_lenient(lenient)
    doc = _load_json(text)
    issues, entries, resolver = _walk_document(doc, lenient)

    if issues:
        first = issues[0].violation
        raise RegisterError(first.message, code=first.code.value, field=first.field)

    risks = tuple(_build_risk(entry, resolver) for entry in entries)
    register = RiskRegister(
        project_name=doc['project'],
        risks=risks,
        type_weights=dict(resolver.weights),
    )
    logger.info(f"Parsed register '{register.project_name}' with {len(risks)} risks")
    return register


def validate_register_document(text: str, lenient: Optional[bool] = None) -> List[RegisterIssue]:
    """Every violation in a register document (empty list = parseable and valid)"""
    lenient = _resolve_lenient(lenient)
    doc = _load_json(text)
    issues, _, _ = _walk_document(doc, lenient)
    return issues


def read_register_text(path: Union[str, Path]) -> str:
    """Register file content; bytes that are not UTF-8 raise RegisterError"""
    try:
        return Path(path).read_text(encoding='utf-8')
    except UnicodeDecodeError as e:
        raise RegisterError(f"{path}: not valid UTF-8 at byte {e.start}", code="EncodingError")


def load_register(path: Union[str, Path], lenient: Optional[bool] = None) -> RiskRegister:
    """Read and parse a UTF-8 register file."""
    return parse_register(read_register_text(path), lenient=lenient)


def serialize_register(register: RiskRegister) -> str:
    """Register file content; parse_register(serialize_register(r)) == r"""
    doc: Dict[str, Any] = {'project': register.project_name}
    if register.type_weights:
        doc['type_weights'] = dict(register.type_weights)
    doc['risks'] = [risk_to_document(risk) for risk in register.risks]
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# ============================================================================
# MITIGATION
# ============================================================================

def apply_mitigation(risk: Risk, plan: Mitigation) -> Risk:
    """
    Attach a mitigation plan, returning a new Risk.

    id, type, probability and the pre-mitigation frequency are untouched. A plan
    whose post_frequency is above the current class is kept but flagged
    (Risk.mitigation_regressed) and logged.
    """
    mitigated = risk.model_copy(update={'mitigation': plan})
    if mitigated.mitigation_regressed:
        logger.warning(
            f"Mitigation for {risk.id} raises frequency "
            f"{risk.frequency.label} -> {plan.post_frequency.label}"
        )
    return mitigated

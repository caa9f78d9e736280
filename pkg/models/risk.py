# models/risk.py
"""
Risk Register Models
Risk types, probability, frequency classes, mitigation plans and the register itself.
"""
import math
from enum import Enum, IntEnum
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator


class RiskKind(str, Enum):
    """Coarse risk types; CUSTOM carries a user label"""
    TECHNOLOGY = "Technology"
    COST = "Cost"
    SCHEDULE = "Schedule"
    SCOPE = "Scope"
    PEOPLE = "People"
    REQUIREMENTS = "Requirements"
    ESTIMATION = "Estimation"
    TOOLS = "Tools"
    ORGANIZATIONAL = "Organizational"
    CUSTOM = "Custom"


class FrequencyClass(IntEnum):
    """Ordinal frequency of occurrence, Unlikely < ... < Frequent"""
    UNLIKELY = 1
    SELDOM = 2
    OCCASIONAL = 3
    LIKELY = 4
    FREQUENT = 5

    @property
    def label(self) -> str:
        return self.name.title()

    @property
    def description(self) -> str:
        return _FREQUENCY_DESCRIPTIONS[self]

    @classmethod
    def from_label(cls, label: str) -> "FrequencyClass":
        """Case-insensitive lookup by name ("likely", "Frequent", ...)."""
        try:
            return cls[label.strip().upper()]
        except (KeyError, AttributeError):
            names = ", ".join(member.label for member in cls)
            raise ValueError(f"unknown frequency '{label}' (expected one of: {names})")


_FREQUENCY_DESCRIPTIONS = {
    FrequencyClass.UNLIKELY: "Will probably not occur during the course of a transformation cycle.",
    FrequencyClass.SELDOM: "Remotely possible; probably not more than once in a transformation cycle.",
    FrequencyClass.OCCASIONAL: "Occurs sporadically.",
    FrequencyClass.LIKELY: "Occurs several times over the course of a transformation cycle.",
    FrequencyClass.FREQUENT: "Likely to occur very often and/or continuously.",
}


class ViolationCode(str, Enum):
    EMPTY_ID = "EmptyId"
    DUPLICATE_ID = "DuplicateId"
    MISSING_FIELD = "MissingField"
    UNKNOWN_KEY = "UnknownKey"
    EMPTY_TYPE = "EmptyType"
    INVALID_SEVERITY_WEIGHT = "InvalidSeverityWeight"
    PROBABILITY_NOT_NUMBER = "ProbabilityNotNumber"
    PROBABILITY_NON_OCCURRENCE = "ProbabilityNonOccurrence"
    PROBABILITY_CERTAINTY = "ProbabilityCertainty"
    UNKNOWN_FREQUENCY = "UnknownFrequency"
    INVALID_RATE = "InvalidRate"
    INVALID_MITIGATION = "InvalidMitigation"


class Violation(BaseModel):
    """One violated invariant: machine-readable code plus human message"""
    code: ViolationCode
    message: str
    field: Optional[str] = None

    def __str__(self) -> str:
        where = f"{self.field}: " if self.field else ""
        return f"{where}{self.message} [{self.code.value}]"

    class Config:
        frozen = True


PROBABILITY_BOUND_MESSAGE = "probability must satisfy 0 < x < 100"


class Probability(BaseModel):
    """Percent likelihood of occurrence, open interval (0, 100)"""
    percent: float

    @field_validator('percent')
    @classmethod
    def check_open_interval(cls, v):
        # 0 is non-occurrence and 100 is certainty (a defect); neither is a risk
        if not (0 < v < 100):
            raise ValueError(PROBABILITY_BOUND_MESSAGE)
        return v

    @property
    def fraction(self) -> float:
        return self.percent / 100

    def __str__(self) -> str:
        return f"{self.percent:g}%"

    class Config:
        frozen = True


class OccurrenceRate(BaseModel):
    """Observed occurrences per stated period, e.g. 7 per hour"""
    count: float = Field(..., ge=0)
    period: str = Field(..., min_length=1)

    @field_validator('count')
    @classmethod
    def check_finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("rate count must be finite")
        return v

    def __str__(self) -> str:
        return f"{self.count:g}/{self.period}"

    class Config:
        frozen = True


class RiskType(BaseModel):
    """Classified risk type with its severity weight"""
    kind: RiskKind
    label: Optional[str] = None  # only for CUSTOM
    severity_weight: float = Field(1.0, gt=0, le=1)

    @model_validator(mode='after')
    def check_label(self):
        if self.kind == RiskKind.CUSTOM:
            if not self.label or not self.label.strip():
                raise ValueError("custom risk type needs a nonempty label")
        elif self.label is not None:
            raise ValueError(f"{self.kind.value} is a built-in type and takes no label")
        return self

    @property
    def name(self) -> str:
        """Display/file name: the built-in kind name or the custom label"""
        if self.kind == RiskKind.CUSTOM:
            return self.label
        return self.kind.value

    @property
    def is_custom(self) -> bool:
        return self.kind == RiskKind.CUSTOM

    def __str__(self) -> str:
        return self.name

    class Config:
        frozen = True


class Mitigation(BaseModel):
    """Mitigation plan and the frequency expected once it is in place"""
    description: str
    post_frequency: FrequencyClass
    post_rate: Optional[OccurrenceRate] = None

    class Config:
        frozen = True


class Risk(BaseModel):
    """One register entry"""
    id: str = Field(..., min_length=1, pattern=r"^\S+$")
    title: str = ""
    risk_type: RiskType
    probability: Probability
    frequency: FrequencyClass
    observed_rate: Optional[OccurrenceRate] = None
    mitigation: Optional[Mitigation] = None
    phase: Optional[str] = None

    @property
    def mitigation_regressed(self) -> bool:
        """True when the plan is expected to make the risk recur more often"""
        return self.mitigation is not None and self.mitigation.post_frequency > self.frequency

    def __str__(self) -> str:
        return f"Risk(id={self.id}, type={self.risk_type.name}, p={self.probability}, f={self.frequency.label})"

    class Config:
        frozen = True


class RiskRegister(BaseModel):
    """Ordered collection of risks for one project"""
    project_name: str
    risks: Tuple[Risk, ...] = ()
    type_weights: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode='after')
    def check_unique_ids(self):
        seen = set()
        for risk in self.risks:
            if risk.id in seen:
                raise ValueError(f"duplicate risk id '{risk.id}'")
            seen.add(risk.id)
        return self

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(risk.id for risk in self.risks)

    def get(self, risk_id: str) -> Optional[Risk]:
        for risk in self.risks:
            if risk.id == risk_id:
                return risk
        return None

    class Config:
        frozen = True

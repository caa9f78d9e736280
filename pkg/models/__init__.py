"""
riskgraph Models Package
"""
from .risk import (
    RiskKind,
    RiskType,
    FrequencyClass,
    Probability,
    OccurrenceRate,
    Mitigation,
    Risk,
    RiskRegister,
    Violation,
    ViolationCode,
)
from .graph import FactorKind, Factor, FactorGraph, BoolMatrix
from .assessment import (
    FrequencyWeights,
    AssessmentConfig,
    ImpactScore,
    Assessment,
    SampledEstimate,
    SuccessEstimate,
)

__all__ = [
    'RiskKind',
    'RiskType',
    'FrequencyClass',
    'Probability',
    'OccurrenceRate',
    'Mitigation',
    'Risk',
    'RiskRegister',
    'Violation',
    'ViolationCode',
    'FactorKind',
    'Factor',
    'FactorGraph',
    'BoolMatrix',
    'FrequencyWeights',
    'AssessmentConfig',
    'ImpactScore',
    'Assessment',
    'SampledEstimate',
    'SuccessEstimate',
]

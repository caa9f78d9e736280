"""
riskgraph Services Package
"""
from .assessment_engine import AssessmentEngine
from .success_predictor import SuccessPredictor

__all__ = [
    'AssessmentEngine',
    'SuccessPredictor'
]

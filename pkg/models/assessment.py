# models/assessment.py
"""
Assessment Models
Impact scores, prioritized assessments and project success estimates
"""
import math
from typing import Dict, Optional

from pydantic import BaseModel, Field, computed_field


class FrequencyWeights(BaseModel):
    """Numeric weight per frequency class (midpoints of five equal bands)"""

    unlikely: float = 0.1
    seldom: float = 0.3
    occasional: float = 0.5
    likely: float = 0.7
    frequent: float = 0.9

    def as_list(self) -> list:
        return [self.unlikely, self.seldom, self.occasional, self.likely, self.frequent]

    def validate_weights(self) -> bool:
        """Each weight in (0, 1) and strictly increasing with the ordinal"""
        weights = self.as_list()
        in_range = all(0 < w < 1 for w in weights)
        increasing = all(a < b for a, b in zip(weights, weights[1:]))
        return in_range and increasing


class AssessmentConfig(BaseModel):
    """Configuration for the assessment engine"""

    frequency_weights: FrequencyWeights = Field(default_factory=FrequencyWeights)


class ImpactScore(BaseModel):
    """Risk impact: product of the three independent factors"""

    type_weight: float = Field(..., gt=0, le=1)
    probability_fraction: float = Field(..., gt=0, lt=1)
    frequency_weight: float = Field(..., gt=0, lt=1)

    @computed_field
    @property
    def value(self) -> float:
        return self.type_weight * self.probability_fraction * self.frequency_weight

    def components(self) -> Dict[str, float]:
        return {
            'type_weight': self.type_weight,
            'probability_fraction': self.probability_fraction,
            'frequency_weight': self.frequency_weight,
        }

    def __str__(self) -> str:
        return f"{self.value:.4f}"

    class Config:
        frozen = True


class Assessment(BaseModel):
    """Per-risk impact plus its global priority rank (1 = highest)"""

    risk_id: str
    impact: ImpactScore
    residual_impact: Optional[ImpactScore] = None
    priority: int = Field(..., ge=1)

    def exposure(self, use_residual: bool = False) -> float:
        """Probability used for materialization: residual when requested and available"""
        if use_residual and self.residual_impact is not None:
            return self.residual_impact.value
        return self.impact.value

    class Config:
        frozen = True


class SampledEstimate(BaseModel):
    """Monte Carlo estimate of the success rate"""

    mean: float = Field(..., ge=0, le=1)
    trials: int = Field(..., ge=1)
    seed: int
    successes: int = Field(..., ge=0)
    generator: str = "numpy.PCG64"

    @property
    def standard_error(self) -> float:
        return math.sqrt(self.mean * (1 - self.mean) / self.trials)

    class Config:
        frozen = True


class SuccessEstimate(BaseModel):
    """
    Project success rate: analytic product and optional sampled check.

    analytic underflows to 0.0 for very large registers; log_analytic keeps
    the natural log of the product in that case.
    """

    analytic: float = Field(..., ge=0, le=1)
    log_analytic: float = Field(0.0, le=0)
    sampled: Optional[SampledEstimate] = None
    use_residual: bool = False
    risk_count: int = Field(0, ge=0)
    independence_assumed: bool = True

    def within_bound(self, k: float = 3.0) -> bool:
        """Sampled mean within k binomial standard errors of the analytic value"""
        if self.sampled is None:
            return True
        sigma = math.sqrt(self.analytic * (1 - self.analytic) / self.sampled.trials)
        return abs(self.sampled.mean - self.analytic) <= k * sigma

    class Config:
        frozen = True

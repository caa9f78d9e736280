# services/assessment_engine.py
from typing import List, Optional
import logging

from models.assessment import Assessment, AssessmentConfig, ImpactScore
from models.errors import InvalidRiskError, MissingMitigationError
from models.risk import FrequencyClass, Risk, RiskRegister
from services.risk_register import validate_risk

logger = logging.getLogger(__name__)

class AssessmentEngine:
    """Derive risk impact from the independent factors and rank risks by it."""

    def __init__(self, config: Optional[AssessmentConfig] = None):
        self.config = config or AssessmentConfig()
        if not self.config.frequency_weights.validate_weights():
            raise ValueError("frequency weights must lie in (0, 1) and increase with the class")

    def frequency_weight(self, frequency: FrequencyClass) -> float:
        """Weight of a frequency class, strictly increasing in the ordinal."""
        return self.config.frequency_weights.as_list()[int(frequency) - 1]

    def impact(self, risk: Risk) -> ImpactScore:
        """
        Impact = severity weight x probability fraction x frequency weight.

        Uses only the risk type, probability and frequency of the risk.
        """
        return self._score(risk, risk.frequency)

    def residual_impact(self, risk: Risk) -> ImpactScore:
        """Impact with the mitigation's post_frequency substituted for frequency."""
        if risk.mitigation is None:
            raise MissingMitigationError(f"risk {risk.id} has no mitigation plan")
        return self._score(risk, risk.mitigation.post_frequency)

    def prioritize(
        self,
        register: RiskRegister,
        use_residual: bool = False
    ) -> List[Assessment]:
        """
        Assess every risk and assign ranks 1..n.

        Args:
            register: RiskRegister whose risks are all valid
            use_residual: rank by residual impact where a mitigation exists

        Returns:
            Assessments sorted by rank (highest impact first, ties by ascending id)
        """
        scored = []
        for risk in register.risks:
            impact = self.impact(risk)
            residual = self.residual_impact(risk) if risk.mitigation is not None else None
            scored.append((risk.id, impact, residual))

        def sort_key(item):
            risk_id, impact, residual = item
            effective = residual if (use_residual and residual is not None) else impact
            return (-effective.value, risk_id)

        scored.sort(key=sort_key)

        assessments = [
            Assessment(risk_id=risk_id, impact=impact, residual_impact=residual, priority=rank)
            for rank, (risk_id, impact, residual) in enumerate(scored, 1)
        ]
        logger.info(f"Prioritized {len(assessments)} risks for '{register.project_name}'")
        return assessments

    def _score(self, risk: Risk, frequency: FrequencyClass) -> ImpactScore:
        # Risk models are validated on construction; model_construct copies are not
        if not (0 < risk.probability.percent < 100) or not (0 < risk.risk_type.severity_weight <= 1):
            raise InvalidRiskError(f"risk {risk.id} is not valid: {validate_risk(risk)}")
        return ImpactScore(
            type_weight=risk.risk_type.severity_weight,
            probability_fraction=risk.probability.fraction,
            frequency_weight=self.frequency_weight(frequency),
        )


# Singleton instance
_engine_instance = None

def get_assessment_engine() -> AssessmentEngine:
    """Get or create the default-configured engine"""
    global _engine_instance
    if _engine_instance is None:
        _engine_instance = AssessmentEngine()
    return _engine_instance


def frequency_weight(frequency: FrequencyClass) -> float:
    return get_assessment_engine().frequency_weight(frequency)


def impact(risk: Risk) -> ImpactScore:
    return get_assessment_engine().impact(risk)


def residual_impact(risk: Risk) -> ImpactScore:
    return get_assessment_engine().residual_impact(risk)


def prioritize(register: RiskRegister, use_residual: bool = False) -> List[Assessment]:
    return get_assessment_engine().prioritize(register, use_residual)

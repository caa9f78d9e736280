# services/success_predictor.py
"""
Success Predictor Service
Aggregates register-wide risk into a project success-rate estimate.

Risks are treated as independent events; each materializes with probability
equal to its impact (or residual impact). The project succeeds iff none does.
"""
import math
from typing import List, Optional
import logging

import numpy as np

from config.settings import settings
from models.assessment import SampledEstimate, SuccessEstimate
from models.errors import SimulationError
from models.risk import RiskRegister
from services.assessment_engine import AssessmentEngine, get_assessment_engine

logger = logging.getLogger(__name__)

GENERATOR_ID = "numpy.PCG64"
SEED_MODULUS = 2 ** 64


def stream_seed(seed: int) -> int:
    """Non-negative PCG64 seed for any integer; seeds congruent mod 2**64 share a stream"""
    return seed % SEED_MODULUS


class SuccessPredictor:
    """Analytic and Monte Carlo success-rate estimates for one engine configuration."""

    def __init__(self, engine: Optional[AssessmentEngine] = None):
        self.engine = engine or get_assessment_engine()

    def exposures(self, register: RiskRegister, use_residual: bool = False) -> List[float]:
        """Materialization probability per risk, in register order"""
        values = []
        for risk in register.risks:
            if use_residual and risk.mitigation is not None:
                values.append(self.engine.residual_impact(risk).value)
            else:
                values.append(self.engine.impact(risk).value)
        return values

    def project_success_rate(self, register: RiskRegister, use_residual: bool = False) -> SuccessEstimate:
        """Analytic estimate: product of (1 - e_i); 1.0 for an empty register"""
        exposures = self.exposures(register, use_residual)
        analytic = math.prod(1 - e for e in exposures)
        log_analytic = math.fsum(math.log1p(-e) for e in exposures)
        if analytic == 0.0:
            logger.warning(f"Success product underflows for {len(exposures)} risks (log={log_analytic:.3f})")
        return SuccessEstimate(
            analytic=analytic,
            log_analytic=min(log_analytic, 0.0),
            use_residual=use_residual,
            risk_count=len(exposures),
        )

    def monte_carlo_success(
        self,
        register: RiskRegister,
        trials: int,
        seed: int,
        use_residual: bool = False,
    ) -> SuccessEstimate:
        """
        Simulate independent materialization of every risk per trial.

        Same (register, trials, seed) gives a bit-identical estimate: draws come
        from one PCG64 stream consumed in trial order, chunked only to bound memory.
        """
        if trials < 1:
            raise SimulationError(f"trials must be a positive integer (got {trials})")

        estimate = self.project_success_rate(register, use_residual)
        exposures = np.array(self.exposures(register, use_residual), dtype=float)

        rng = np.random.default_rng(stream_seed(seed))
        successes = 0
        chunk = max(1, settings.MC_CHUNK_SIZE)
        remaining = trials
        while remaining > 0 and exposures.size:
            rows = min(chunk, remaining)
            draws = rng.random((rows, exposures.size))
            failed = (draws < exposures).any(axis=1)
            successes += int(rows - np.count_nonzero(failed))
            remaining -= rows
        if not exposures.size:
            successes = trials

        sampled = SampledEstimate(
            mean=successes / trials,
            trials=trials,
            seed=seed,
            successes=successes,
            generator=GENERATOR_ID,
        )
        logger.info(
            f"Monte Carlo: {successes}/{trials} successes (seed={seed}), analytic={estimate.analytic:.6f}"
        )
        return estimate.model_copy(update={'sampled': sampled})


def project_success_rate(register: RiskRegister, use_residual: bool = False) -> SuccessEstimate:
    return SuccessPredictor().project_success_rate(register, use_residual)


def monte_carlo_success(
    register: RiskRegister,
    trials: int,
    seed: int,
    use_residual: bool = False,
) -> SuccessEstimate:
    return SuccessPredictor().monte_carlo_success(register, trials, seed, use_residual)

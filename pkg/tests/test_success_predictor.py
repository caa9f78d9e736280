import math

import numpy as np
import pytest

from models.errors import SimulationError
from models.risk import FrequencyClass, Probability, RiskRegister
from services.assessment_engine import impact
from services.risk_register import parse_register
from services.success_predictor import GENERATOR_ID, monte_carlo_success, project_success_rate, stream_seed
from tests.conftest import make_risk, random_register


def register_of(*risks):
    return RiskRegister(project_name="p", risks=tuple(risks))


def test_analytic_product():
    register = register_of(
        make_risk("R1", probability=50, frequency=FrequencyClass.OCCASIONAL),   # 0.25
        make_risk("R2", probability=20, frequency=FrequencyClass.OCCASIONAL),   # 0.10
    )
    estimate = project_success_rate(register)
    assert estimate.analytic == pytest.approx(0.675)
    assert estimate.sampled is None
    assert estimate.risk_count == 2
    assert estimate.independence_assumed


def test_empty_register_is_certain_success():
    empty = register_of()
    assert project_success_rate(empty).analytic == 1.0
    estimate = monte_carlo_success(empty, trials=1000, seed=1)
    assert estimate.sampled.mean == 1.0
    assert estimate.sampled.successes == 1000


def test_residual_raises_success_when_frequencies_drop(timer_register_text):
    register = parse_register(timer_register_text)
    without = project_success_rate(register)
    with_residual = project_success_rate(register, use_residual=True)
    assert with_residual.analytic > without.analytic
    assert with_residual.use_residual


def test_residual_property_randomized():
    rng = np.random.default_rng(17)
    for _ in range(200):
        n = int(rng.integers(1, 10))
        risks = []
        for i in range(n):
            pre = FrequencyClass(int(rng.integers(2, 6)))
            post = FrequencyClass(int(rng.integers(1, pre)))
            risks.append(make_risk(f"R{i}", probability=float(rng.integers(1, 100)), frequency=pre, post_frequency=post))
        register = register_of(*risks)
        assert project_success_rate(register, use_residual=True).analytic > project_success_rate(register).analytic


def test_analytic_bounds_and_monotonicity():
    rng = np.random.default_rng(19)
    for _ in range(200):
        register = random_register(rng, max_risks=30)
        analytic = project_success_rate(register).analytic
        assert 0 < analytic <= 1
        extra = make_risk("ZZZ", probability=float(rng.integers(1, 100)))
        grown = RiskRegister(project_name="random", risks=register.risks + (extra,))
        assert project_success_rate(grown).analytic <= analytic


def test_single_risk_convergence():
    register = register_of(make_risk(probability=50, frequency=FrequencyClass.OCCASIONAL))  # e = 0.25
    estimate = monte_carlo_success(register, trials=100_000, seed=42)
    assert abs(estimate.sampled.mean - 0.75) <= 3 * math.sqrt(0.75 * 0.25 / 100_000)
    assert estimate.sampled.generator == GENERATOR_ID
    assert estimate.within_bound()


def test_same_seed_is_bit_identical():
    register = register_of(
        make_risk("R1", probability=35, frequency=FrequencyClass.LIKELY),
        make_risk("R2", probability=80, frequency=FrequencyClass.SELDOM),
    )
    first = monte_carlo_success(register, trials=20_000, seed=7)
    second = monte_carlo_success(register, trials=20_000, seed=7)
    assert first == second
    assert first.model_dump_json() == second.model_dump_json()
    assert monte_carlo_success(register, trials=20_000, seed=8) != first


def test_chunking_does_not_change_stream(monkeypatch):
    from config.settings import settings

    register = register_of(make_risk("R1", probability=35), make_risk("R2", probability=70))
    whole = monte_carlo_success(register, trials=10_000, seed=3)
    monkeypatch.setattr(settings, "MC_CHUNK_SIZE", 999)
    chunked = monte_carlo_success(register, trials=10_000, seed=3)
    assert chunked == whole


def test_zero_trials_rejected():
    with pytest.raises(SimulationError):
        monte_carlo_success(register_of(make_risk()), trials=0, seed=1)


def test_monte_carlo_tracks_analytic_on_random_registers():
    rng = np.random.default_rng(23)
    hits = 0
    for seed in range(20):
        register = random_register(rng, max_risks=8)
        estimate = monte_carlo_success(register, trials=100_000, seed=seed)
        hits += estimate.within_bound(3.0)
    assert hits >= 19


def test_monte_carlo_bound_over_many_seeds():
    register = register_of(
        make_risk("R1", probability=40, frequency=FrequencyClass.LIKELY),
        make_risk("R2", probability=25, frequency=FrequencyClass.FREQUENT),
        make_risk("R3", probability=60, frequency=FrequencyClass.SELDOM),
    )
    analytic = project_success_rate(register).analytic
    assert analytic == pytest.approx(math.prod(1 - impact(r).value for r in register.risks))
    within = sum(monte_carlo_success(register, trials=100_000, seed=s).within_bound() for s in range(100))
    assert within >= 99


def test_analytic_never_rises_when_a_risk_gets_worse():
    rng = np.random.default_rng(37)
    for _ in range(300):
        register = random_register(rng, max_risks=20)
        if not register.risks:
            continue
        before = project_success_rate(register).analytic
        target = register.risks[int(rng.integers(len(register.risks)))]
        if target.frequency < FrequencyClass.FREQUENT and rng.random() < 0.5:
            raised = target.model_copy(update={'frequency': FrequencyClass(target.frequency + 1)})
        elif target.probability.percent < 99:
            bumped = min(99.0, target.probability.percent + float(rng.integers(1, 20)))
            raised = target.model_copy(update={'probability': Probability(percent=bumped)})
        else:
            continue
        worse = RiskRegister(
            project_name="random",
            risks=tuple(raised if r.id == target.id else r for r in register.risks),
        )
        assert project_success_rate(worse).analytic <= before


def test_large_register_underflows_to_zero():
    risks = tuple(
        make_risk(f"R{i:03d}", probability=99, frequency=FrequencyClass.FREQUENT) for i in range(400)
    )
    register = register_of(*risks)
    estimate = project_success_rate(register)
    assert estimate.analytic == 0.0
    assert estimate.log_analytic == pytest.approx(400 * math.log1p(-0.891))
    sampled = monte_carlo_success(register, trials=200, seed=1)
    assert sampled.sampled.successes == 0
    assert sampled.within_bound()


def test_log_analytic_matches_product():
    register = register_of(
        make_risk("R1", probability=50, frequency=FrequencyClass.OCCASIONAL),
        make_risk("R2", probability=20, frequency=FrequencyClass.OCCASIONAL),
    )
    estimate = project_success_rate(register)
    assert math.exp(estimate.log_analytic) == pytest.approx(estimate.analytic)
    assert project_success_rate(register_of()).log_analytic == 0.0


def test_negative_and_large_seeds():
    register = register_of(make_risk("R1", probability=35), make_risk("R2", probability=70))
    negative = monte_carlo_success(register, trials=5000, seed=-1)
    assert negative.sampled.seed == -1
    assert stream_seed(-1) == 2 ** 64 - 1
    wrapped = monte_carlo_success(register, trials=5000, seed=2 ** 64 - 1)
    assert wrapped.sampled.successes == negative.sampled.successes

    huge = monte_carlo_success(register, trials=5000, seed=10 ** 30)
    assert huge.sampled.seed == 10 ** 30
    assert huge == monte_carlo_success(register, trials=5000, seed=10 ** 30)

from pathlib import Path
from typing import Optional

import numpy as np
import pytest

from models.graph import BoolMatrix, Factor, FactorGraph, FactorKind
from models.risk import FrequencyClass, Mitigation, Probability, Risk, RiskRegister
from services.risk_register import classify_type

TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"
GOLDEN = TESTS_DIR / "golden"

TYPE_LABELS = [
    "Technology", "Cost", "Schedule", "Scope", "People",
    "Requirements", "Estimation", "Tools", "Organizational", "vendor lock-in",
]


def make_risk(
    risk_id: str = "R1",
    probability: float = 50,
    frequency: FrequencyClass = FrequencyClass.OCCASIONAL,
    type_label: str = "Schedule",
    weight: float = 1.0,
    post_frequency: Optional[FrequencyClass] = None,
    title: str = "",
) -> Risk:
    mitigation = None
    if post_frequency is not None:
        mitigation = Mitigation(description="plan", post_frequency=post_frequency)
    return Risk(
        id=risk_id,
        title=title,
        risk_type=classify_type(type_label, severity_weight=weight),
        probability=Probability(percent=probability),
        frequency=frequency,
        mitigation=mitigation,
    )


def random_risk(rng: np.random.Generator, risk_id: str, with_mitigation: bool = True) -> Risk:
    post = None
    if with_mitigation and rng.random() < 0.4:
        post = FrequencyClass(int(rng.integers(1, 6)))
    return make_risk(
        risk_id=risk_id,
        probability=float(rng.integers(1, 100)),
        frequency=FrequencyClass(int(rng.integers(1, 6))),
        type_label=TYPE_LABELS[int(rng.integers(len(TYPE_LABELS)))],
        post_frequency=post,
    )


def random_register(rng: np.random.Generator, max_risks: int = 50) -> RiskRegister:
    n = int(rng.integers(0, max_risks + 1))
    risks = tuple(random_risk(rng, f"R{i:03d}") for i in range(n))
    return RiskRegister(project_name="random", risks=risks)


def random_matrix(rng: np.random.Generator, n: int, density: float = 0.2) -> BoolMatrix:
    order = tuple(f"F{i}" for i in range(n))
    return BoolMatrix(order=order, cells=rng.random((n, n)) < density)


def random_graph(rng: np.random.Generator, max_factors: int = 12, density: float = 0.2) -> FactorGraph:
    n = int(rng.integers(0, max_factors + 1))
    factors = tuple(Factor(id=f"F{i}", name=f"Factor {i}", kind=FactorKind.DEPENDENT) for i in range(n))
    edges = frozenset(
        (f"F{i}", f"F{j}")
        for i in range(n)
        for j in range(n)
        if i != j and rng.random() < density
    )
    return FactorGraph(factors=factors, edges=edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def sample_register_text():
    return (FIXTURES / "sample_register.json").read_text(encoding="utf-8")


@pytest.fixture
def timer_register_text():
    return (FIXTURES / "timer_register.json").read_text(encoding="utf-8")

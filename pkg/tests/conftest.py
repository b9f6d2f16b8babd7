from __future__ import annotations

from pathlib import Path

import pytest

from voi_workbench import (
    ChanceVariable,
    DecisionModel,
    DecisionVariable,
    FractilePair,
    SecondOrderAnnotation,
    UtilityTable,
    fit_beta_from_fractiles,
    parse_ref,
)

REPO_ROOT = Path(__file__).resolve().parent.parent
MODELS_DIR = REPO_ROOT / "models"

TABLE1 = {
    ("no", "dry", "yes"): (0.7, 0.3),
    ("no", "dry", "no"): (0.6, 0.4),
    ("no", "wet", "yes"): (0.6, 0.4),
    ("no", "wet", "no"): (0.5, 0.5),
    ("yes", "dry", "yes"): (0.6, 0.4),
    ("yes", "dry", "no"): (0.5, 0.5),
    ("yes", "wet", "yes"): (0.5, 0.5),
    ("yes", "wet", "no"): (0.4, 0.6),
}


def build_conditioning_vars():
    return (
        ChanceVariable("Sus", ("yes", "no"), (), {(): (0.6, 0.4)}),
        ChanceVariable("Field", ("dry", "wet"), (), {(): (0.7, 0.3)}),
        ChanceVariable("Bonus", ("yes", "no"), (), {(): (0.2, 0.8)}),
    )


def build_bet_decision():
    decision = DecisionVariable("Gamble", ("Bet", "Do-not-bet"))
    utility = UtilityTable(
        ("Win",),
        {
            ("Bet", ("yes",)): 5000.0,
            ("Bet", ("no",)): -5000.0,
            ("Do-not-bet", ("yes",)): 0.0,
            ("Do-not-bet", ("no",)): 0.0,
        },
    )
    return decision, utility


def build_football() -> DecisionModel:
    sus, field, bonus = build_conditioning_vars()
    win = ChanceVariable("Win", ("yes", "no"), ("Sus", "Field", "Bonus"), dict(TABLE1))
    decision, utility = build_bet_decision()
    return DecisionModel((sus, field, bonus, win), decision, utility)


def build_football_prior(point: float = 0.5, cost: float = 50.0) -> DecisionModel:
    fr = FractilePair([(0.25, 0.5), (0.75, 0.6)])
    dist = fit_beta_from_fractiles(fr)
    ann = SecondOrderAnnotation(
        parse_ref("p(Win=yes)"),
        "One hour reassessing the win probability conditioned on the events it hinges on.",
        dist,
        cost,
        fr,
    )
    win = ChanceVariable("Win", ("yes", "no"), (), {(): (point, 1.0 - point)})
    decision, utility = build_bet_decision()
    return DecisionModel((win,), decision, utility, (ann,))


@pytest.fixture
def football() -> DecisionModel:
    return build_football()


@pytest.fixture
def football_prior() -> DecisionModel:
    return build_football_prior()


@pytest.fixture
def models_dir() -> Path:
    return MODELS_DIR

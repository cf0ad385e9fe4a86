"""Simulated users answering pairwise tour-set queries.

A deterministic user always picks the option with the higher hidden reward (ties go
to the first option). A Boltzmann user is noisily rational: the first option wins
with probability ``1 / (1 + exp(beta * delta))`` where ``delta`` is the hidden
reward advantage of the second option, normalized by the user's reward scale so
beta means the same thing across scenarios of different size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .gtop import TourSet
from .polyhedron import Cut
from .rewards import DEFAULT_DECAYS, DecaySet, GroundTruthUser, features
from .scenario import Environment

DETERMINISTIC = "deterministic"
BOLTZMANN = "boltzmann"


@dataclass
class UserModel:
    """A ground-truth user together with its response rule."""

    truth: GroundTruthUser
    kind: str = DETERMINISTIC

    def __post_init__(self) -> None:
        if self.kind not in (DETERMINISTIC, BOLTZMANN):
            raise ValueError(f"unknown user kind {self.kind!r}")


@dataclass
class QueryOutcome:
    """The result of presenting one query: the choice and the cut it induces."""

    chosen: int
    cut: Optional[Cut]
    prob_chosen: Optional[float]
    informative: bool


def choice_probability(user: UserModel, delta_dot: float) -> float:
    """Probability the user picks option 1 given option 2's reward advantage."""
    if user.kind == DETERMINISTIC:
        return 1.0 if delta_dot <= 0 else 0.0
    exponent = user.truth.beta * delta_dot
    exponent = max(-60.0, min(60.0, exponent))
    return 1.0 / (1.0 + math.exp(exponent))


def respond(
    user: UserModel,
    option1: TourSet,
    option2: TourSet,
    env: Environment,
    rng: np.random.Generator,
    decays: DecaySet = DEFAULT_DECAYS,
) -> QueryOutcome:
    """Present (option1, option2) and sample the user's choice.

    Featurewise-identical options are flagged uninformative and induce no cut.
    """
    phi1 = features(option1, env, decays)
    phi2 = features(option2, env, decays)
    diff = phi2 - phi1
    informative = bool(np.max(np.abs(diff)) > 1e-9)
    delta_dot = float(diff @ user.truth.weights)
    if user.kind == BOLTZMANN:
        delta_dot /= user.truth.reward_scale
    p1 = choice_probability(user, delta_dot)
    if user.kind == DETERMINISTIC:
        chosen = 1 if p1 >= 0.5 else 2
    else:
        chosen = 1 if rng.random() < p1 else 2
    cut = None
    if informative:
        direction = (phi1 - phi2) if chosen == 1 else (phi2 - phi1)
        cut = Cut(direction, chosen=chosen)
    return QueryOutcome(
        chosen=chosen,
        cut=cut,
        prob_chosen=p1 if chosen == 1 else 1.0 - p1,
        informative=informative,
    )


Responder = Callable[[TourSet, TourSet], QueryOutcome]


def make_responder(
    user: UserModel,
    env: Environment,
    rng: np.random.Generator,
    decays: DecaySet = DEFAULT_DECAYS,
) -> Responder:
    """Bind a user to an environment so sessions can call it with just the pair."""

    def _respond(option1: TourSet, option2: TourSet) -> QueryOutcome:
        return respond(user, option1, option2, env, rng, decays)

    return _respond

"""How far the loop can iterate before the output cat loses W(0,0) < 0.

Everything here works in phase space: the heralded cat is an exact signed Gaussian
mixture and every gate step is a Gaussian channel, so arbitrarily many steps and
arbitrarily strong ancillae cost nothing extra.
"""

import math
from typing import List, Optional, Sequence

import numpy as np

from loop_squeezer.constants import SCALABILITY_CAT
from loop_squeezer.gates import GateProgram, LossScenario
from loop_squeezer.gaussian import (
    compose_channels,
    equivalent_input_noise,
    loss_channel,
)
from loop_squeezer.sources import CatSpec, cat_phase_space


def repeated_r(r_values: Sequence[float], n_steps: int) -> List[float]:
    """First n_steps entries of r_values repeated cyclically."""
    if not r_values:
        raise ValueError("r_values must not be empty")
    return [r_values[i % len(r_values)] for i in range(n_steps)]


def negativity_curve(
    cat: CatSpec,
    r_values: Sequence[float],
    scenario: LossScenario,
    max_steps: int,
) -> List[float]:
    """W(0,0) of the cat after 0, 1, ..., max_steps steps.

    The cat takes the scenario's preparation loss; steps cycle through r_values.
    """
    state = cat_phase_space(cat.with_loss(scenario.cat_preparation_loss))
    values = [state.negativity()]
    if max_steps < 1:
        return values
    program = GateProgram.from_r_list(repeated_r(r_values, max_steps), scenario)
    for X, Y in program.gaussian_channels():
        state = state.apply_channel(X, Y)
        values.append(state.negativity())
    return values


def subtraction_survives(program: GateProgram, preparation_loss: float) -> bool:
    """Closed-form test for an ideally photon-subtracted pure squeezed vacuum.

    With N the total added noise referred back to the cat's input, W(0,0) < 0 holds
    exactly when det N < 1/4.
    """
    channels = [loss_channel(1.0 - preparation_loss)] + program.gaussian_channels()
    X, Y = compose_channels(channels)
    noise = equivalent_input_noise(X, Y)
    return float(np.linalg.det(noise)) < 0.25


def _exact_negative(cat: CatSpec, program: GateProgram) -> bool:
    state = cat_phase_space(cat)
    X, Y = compose_channels(program.gaussian_channels())
    return state.apply_channel(X, Y).negativity() < 0


def max_negative_steps(
    r: float,
    scenario: LossScenario,
    cat: Optional[CatSpec] = None,
    max_steps: int = 60,
) -> int:
    """Largest n such that n identical steps of squeezing r keep W(0,0) < 0.

    Without a cat the projector-heralded source of SCALABILITY_CAT is used. The
    ideal-subtraction test picks a starting count, then the exact mixture walks to
    the boundary (the negativity only degrades with each step).
    """
    cat = (cat or CatSpec.from_dict(SCALABILITY_CAT)).with_loss(scenario.cat_preparation_loss)
    full = GateProgram.from_r_list([r] * max_steps, scenario)
    guess = 0
    for n in range(1, max_steps + 1):
        if not subtraction_survives(full.prefix(n), scenario.cat_preparation_loss):
            break
        guess = n
    if guess > 0 and not _exact_negative(cat, full.prefix(guess)):
        while guess > 0 and not _exact_negative(cat, full.prefix(guess)):
            guess -= 1
        return guess
    while guess < max_steps and _exact_negative(cat, full.prefix(guess + 1)):
        guess += 1
    return guess


def steps_table(
    r_values: Sequence[float],
    scenario: LossScenario,
    cat: Optional[CatSpec] = None,
    max_steps: int = 60,
) -> List[dict]:
    return [
        {
            "r": float(r),
            "max_steps": max_negative_steps(r, scenario, cat, max_steps),
            "squeezing_db": 20.0 * r / math.log(10.0),
        }
        for r in r_values
    ]

from tests.fixtures.local_fixtures import tame_model_p5, tame_place, worked_rep
from tests.fixtures.model_fixtures import (
    crossing_uncond_model,
    grh_lift,
    grh_model,
    uncond_lift,
    uncond_model,
)

__all__ = [
    "tame_model_p5",
    "tame_place",
    "worked_rep",
    "crossing_uncond_model",
    "grh_lift",
    "grh_model",
    "uncond_lift",
    "uncond_model",
]

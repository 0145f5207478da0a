from . import (
    branch,
    extremal,
    fiber,
    ground_state,
    nehari_check,
    nehari_rq,
    quotient,
    zero_mass,
)

name = "nehari"
__all__ = [
    "fiber",
    "quotient",
    "extremal",
    "ground_state",
    "branch",
    "zero_mass",
    "nehari_check",
    "nehari_rq",
]

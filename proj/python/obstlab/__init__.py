"""Obstacle-problem lab: Newtonian potentials, paraboloid solutions, diagnostics."""

from ._core import (
    Blowdown,
    Ellipsoid,
    GridSolution,
    ObstlabError,
    Paraboloid,
    ParaboloidSolution,
    acf,
    compare_and_slide,
    construct,
    decay_scan,
    frequency,
    hele_shaw,
    newton_constant,
    solve,
    solve_paraboloid,
)

__all__ = [
    "Blowdown",
    "Ellipsoid",
    "GridSolution",
    "ObstlabError",
    "Paraboloid",
    "ParaboloidSolution",
    "acf",
    "compare_and_slide",
    "construct",
    "decay_scan",
    "frequency",
    "hele_shaw",
    "newton_constant",
    "solve",
    "solve_paraboloid",
]

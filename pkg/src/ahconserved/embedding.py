"""Leading-order optimal isometric embedding equation.

For a boost vector ``a`` the time function ``X0`` of the optimal embedding
solves ``lap (lap + 2) X0 / 2 = RHS`` with::

    RHS = -lap h / 2 + sum_i (a^i / a0) [div(h grad X^i) + lap(h X^i / 2)]

where ``h`` is the ``r^-2`` coefficient of ``|H|``.  The operator kills
``l <= 1``; the equation is solvable exactly when ``RHS`` has no ``l <= 1``
content, which happens when ``a`` points along ``(E, P)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import BoostVector
from .sphere import (
    ScalarField,
    analyze,
    coordinate_functions,
    divergence,
    gradient,
    invert_shifted_bilaplacian,
    laplacian,
)

SOLVABLE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OptimalSolution:
    X0_0: ScalarField
    obstruction: np.ndarray  # l = 0 and the three l = 1 coefficients of RHS
    solvable: bool
    tau_leading: ScalarField
    rhs: ScalarField
    residual: float


def assemble_rhs(h_m2: ScalarField, a: BoostVector) -> ScalarField:
    rhs = -0.5 * laplacian(h_m2)
    for ai, x in zip(a.a, coordinate_functions(h_m2.grid)):
        if ai == 0.0:
            continue
        term = divergence(gradient(x) * h_m2) + laplacian(0.5 * h_m2 * x)
        rhs = rhs + (ai / a.a0) * term
    return rhs


def shifted_bilaplacian(u: ScalarField) -> ScalarField:
    """``lap (lap + 2) u``."""
    lu = laplacian(u)
    return laplacian(lu + 2.0 * u)


def solve(h_m2: ScalarField, a: BoostVector, tol=SOLVABLE_TOL) -> OptimalSolution:
    """Classify and, when possible, solve the embedding equation.

    The ``l <= 1`` part of ``X0`` is set to zero; with the subleading observer
    fixed to zero, ``tau_leading`` equals ``X0_0``.
    """
    rhs = assemble_rhs(h_m2, a)
    low = analyze(rhs).low_modes(1)
    scale = rhs.sup()
    solvable = bool(np.all(np.abs(low) <= tol * scale))
    grid = h_m2.grid
    if solvable:
        X0 = invert_shifted_bilaplacian(2.0 * rhs, tol=tol)
        residual = (0.5 * shifted_bilaplacian(X0) - rhs).sup()
    else:
        X0 = ScalarField.zeros(grid)
        residual = float("nan")
    return OptimalSolution(X0_0=X0, obstruction=low, solvable=solvable, tau_leading=X0,
                           rhs=rhs, residual=residual)

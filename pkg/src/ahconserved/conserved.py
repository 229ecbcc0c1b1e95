"""Global quantities of asymptotically hyperbolic data.

Energy and linear momentum are moments of the mass aspect
``m = 3/2 tr g_ab_m1 + tr p_ab_m1 + g_rr_m5``::

    E = (1/8 pi) int m,        P^i = (1/8 pi) int X^i m.

Center of mass and angular momentum are defined only on the foliation with
vanishing linear momentum; both raise :class:`NonzeroMomentum` otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import AHExpansionData, BoostVector
from .sphere import (
    ScalarField,
    coordinate_functions,
    curl,
    gradient,
    integrate,
    norm_sq,
    trace,
)

MOMENTUM_TOL = 1e-8
TIMELIKE_MARGIN = 1e-12
EIGHT_PI = 8.0 * math.pi


class NullOrSpacelikeMomentum(ValueError):
    """``E <= |P|``: no rest frame, rest mass undefined."""


class NonzeroMomentum(ValueError):
    """Center of mass and angular momentum need a foliation with ``P = 0``."""


class MissingMatterField(ValueError):
    """The data carries no matter flux field."""


def mass_aspect(d: AHExpansionData) -> ScalarField:
    return 1.5 * trace(d.g_ab_m1) + trace(d.p_ab_m1) + d.g_rr_m5


def _moments(f):
    """``int X^i f`` for ``i = 1, 2, 3``."""
    return np.array([integrate(x * f) for x in coordinate_functions(f.grid)])


def energy_momentum(d: AHExpansionData):
    m = mass_aspect(d)
    return integrate(m) / EIGHT_PI, _moments(m) / EIGHT_PI


def boost_energy(d: AHExpansionData, a: BoostVector) -> float:
    """``(1/8 pi) int m (a0 + a . X)``."""
    return integrate(mass_aspect(d) * a.linear_function(d.grid)) / EIGHT_PI


def rest_frame(d: AHExpansionData):
    """``(M_rest, a*)`` with ``a* = (E, -P)/M_rest`` the minimizer of :func:`boost_energy`."""
    E, P = energy_momentum(d)
    p = float(np.linalg.norm(P))
    if not E > p + TIMELIKE_MARGIN:
        raise NullOrSpacelikeMomentum(f"E = {E:.6g} is not larger than |P| = {p:.6g}")
    M = math.sqrt((E - p) * (E + p))
    return M, BoostVector(E / M, tuple(-P / M))


def finiteness_obstruction(d: AHExpansionData):
    """``O1 = int X^i m`` and ``O2 = int X^i curl(alpha_m1)`` with ``alpha_m1 = grad m / 2``."""
    m = mass_aspect(d)
    return _moments(m), _moments(curl(0.5 * gradient(m)))


def _require_rest(d, tol):
    E, P = energy_momentum(d)
    p = float(np.linalg.norm(P))
    if p > tol * max(E, 1.0):
        raise NonzeroMomentum(f"|P| = {p:.3e} exceeds {tol:g} * max(E, 1); "
                              "center of mass and angular momentum are undefined")


def center_of_mass(d: AHExpansionData, tol=MOMENTUM_TOL, trace_variant="g_m2"):
    """``(1/8 pi) int X^i (2 tr g_ab_m2 + g_rr_m6 + div g_ra_m3 + tr p_ab_m2)``.

    ``trace_variant="g_m1"`` swaps ``g_ab_m2`` for ``g_ab_m1`` in the first term;
    it exists only so the two readings can be compared.
    """
    from .geometry import h_m3_combination

    _require_rest(d, tol)
    return _moments(h_m3_combination(d, trace_variant)) / EIGHT_PI


def com_via_embedding(d: AHExpansionData, tol=MOMENTUM_TOL):
    """Center of mass through the optimal embedding.

    Returns ``(direct, shortcut)``: ``(1/8 pi) int X^i (h0_m3 - h_m3)`` with
    ``h0_m3`` from the linearized embedding, and
    ``-(1/8 pi) int X^i (h_m3 + h_m2^2 / 4)``.
    """
    from .embedding import solve
    from .geometry import coordinate_sphere_expansion, solve_linearized_embedding

    _require_rest(d, tol)
    exp = coordinate_sphere_expansion(d)
    sol = solve(exp.h_m2, BoostVector.identity())
    if not sol.solvable:
        raise NonzeroMomentum("optimal embedding equation is not solvable for this data")
    lin = solve_linearized_embedding(sol.X0_0, d.g_ab_0)
    direct = _moments(lin.h0_m3 - exp.h_m3) / EIGHT_PI
    shortcut = -_moments(exp.h_m3 + 0.25 * exp.h_m2 * exp.h_m2) / EIGHT_PI
    return direct, shortcut


def angular_momentum(d: AHExpansionData, tol=MOMENTUM_TOL):
    """``(1/8 pi) int X^i curl(g_ra_m3 + p_ra_m3)`` with ``eps_{theta phi} = +1``."""
    _require_rest(d, tol)
    return _moments(curl(d.g_ra_m3 + d.p_ra_m3)) / EIGHT_PI


def vacuum_loss_rate(d: AHExpansionData) -> float:
    """``-(1/8 pi) int |p_ab_0 + g_ab_0|^2``."""
    return -integrate(norm_sq(d.p_ab_0 + d.g_ab_0)) / EIGHT_PI


def matter_loss_rate(d: AHExpansionData) -> float:
    """Vacuum rate plus ``-(1/8 pi) int F^2``."""
    if d.matter_F is None:
        raise MissingMatterField("matter_F is absent; the data is vacuum")
    return vacuum_loss_rate(d) - integrate(d.matter_F * d.matter_F) / EIGHT_PI


@dataclass(frozen=True)
class ConservedSet:
    """Headline record; undefined entries are ``None`` with a reason in ``undefined``."""

    E: float
    P: tuple
    M_rest: Optional[float]
    rest_frame: Optional[BoostVector]
    C: Optional[tuple]
    J: Optional[tuple]
    vacuum_loss_rate: float
    matter_loss_rate: Optional[float]
    undefined: dict

    def to_record(self):
        rf = None if self.rest_frame is None else [self.rest_frame.a0, *self.rest_frame.a]
        return {
            "E": self.E,
            "P": list(self.P),
            "M_rest": self.M_rest,
            "rest_frame": rf,
            "C": None if self.C is None else list(self.C),
            "J": None if self.J is None else list(self.J),
            "vacuum_loss_rate": self.vacuum_loss_rate,
            "matter_loss_rate": self.matter_loss_rate,
            "undefined": dict(self.undefined),
        }


def conserved_set(d: AHExpansionData, tol=MOMENTUM_TOL) -> ConservedSet:
    E, P = energy_momentum(d)
    undefined = {}
    M = frame = None
    try:
        M, frame = rest_frame(d)
    except NullOrSpacelikeMomentum as exc:
        undefined["M_rest"] = undefined["rest_frame"] = str(exc)
    C = J = None
    try:
        C = tuple(float(x) for x in center_of_mass(d, tol))
        J = tuple(float(x) for x in angular_momentum(d, tol))
    except NonzeroMomentum as exc:
        undefined["C"] = undefined["J"] = str(exc)
    matter = matter_loss_rate(d) if d.matter_F is not None else None
    return ConservedSet(
        E=float(E), P=tuple(float(x) for x in P), M_rest=M, rest_frame=frame, C=C, J=J,
        vacuum_loss_rate=vacuum_loss_rate(d), matter_loss_rate=matter, undefined=undefined,
    )

"""Geometry of large coordinate spheres.

* :func:`coordinate_sphere_expansion` gives the coefficients of ``|H|``,
  the connection one-form and the induced metric in powers of ``1/r``.
* :func:`boosted_expansion` does the same for the leading terms on a boosted
  foliation ``r = R * Ft``.
* :func:`solve_linearized_embedding` solves the linearized isometric
  embedding system for the correction ``h0_m3``.
* :func:`finite_r_mean_curvature` evaluates ``|H|`` at a finite radius for the
  metric obtained by truncating the decay series exactly at the stored
  orders; :func:`extract_expansion` fits such samples in powers of ``1/r``.
  Together they check the expansion formulas independently.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conserved import mass_aspect
from .data import AHExpansionData, BoostVector
from .sphere import (
    OneFormField,
    ScalarField,
    SymTensorField,
    analyze,
    curl,
    divergence,
    gradient,
    inner,
    laplacian,
    norm_sq,
    sphere_grid,
    synthesize,
    tensor_curl,
    trace,
)

TRACE_VARIANTS = ("g_m2", "g_m1")
MIN_RADIUS = 10.0
MAX_CONDITION = 1e12


class NonSpacelikeH(ArithmeticError):
    """The mean curvature vector is not spacelike at the requested radius."""


class IllConditionedFit(ValueError):
    """Too few radii, or a Vandermonde system too ill-conditioned to trust."""


class SolverFailure(RuntimeError):
    """The linearized embedding system has no solution for the given data."""


@dataclass(frozen=True, eq=False)
class SphereExpansion:
    """Coefficients of ``|H| = 2/r + h_m2/r^2 + h_m3/r^3``, of
    ``alpha_H = alpha_m1/r + alpha_m2/r^2`` (only ``curl alpha_m2`` is kept),
    and of ``sigma = r^2 sigma~ + sigma_0 + sigma_m1/r``.

    ``h_m3_remainder`` holds the terms of the exact ``r^-3`` coefficient for
    the truncated metric that the closed-form ``h_m3`` leaves out: the
    constant from truncating ``g_rr`` and the quadratic couplings of the
    leading tensors, ``1 + |g_ab_0|^2 + <g_ab_0, p_ab_0>``.
    """

    h_m2: ScalarField
    h_m3: ScalarField
    alpha_m1: OneFormField
    alpha_m2_curl: ScalarField
    sigma_0: SymTensorField
    sigma_m1: SymTensorField
    h_m3_remainder: ScalarField

    @property
    def h_m3_truncated(self):
        return self.h_m3 + self.h_m3_remainder


def h_m3_combination(d: AHExpansionData, variant="g_m2"):
    """``g_rr_m6 + 2 tr g + div g_ra_m3 + tr p_ab_m2`` with ``g`` the selected trace term."""
    if variant not in TRACE_VARIANTS:
        raise ValueError(f"unknown trace variant {variant!r}; expected one of {TRACE_VARIANTS}")
    g = d.g_ab_m2 if variant == "g_m2" else d.g_ab_m1
    return d.g_rr_m6 + 2.0 * trace(g) + divergence(d.g_ra_m3) + trace(d.p_ab_m2)


def coordinate_sphere_expansion(d: AHExpansionData, trace_variant="g_m2") -> SphereExpansion:
    m = mass_aspect(d)
    h_m3 = -h_m3_combination(d, trace_variant) - 0.25 * m * m
    remainder = 1.0 + norm_sq(d.g_ab_0) + inner(d.g_ab_0, d.p_ab_0)
    return SphereExpansion(
        h_m2=-m,
        h_m3=h_m3,
        alpha_m1=0.5 * gradient(m),
        alpha_m2_curl=-curl(d.g_ra_m3 + d.p_ra_m3),
        sigma_0=d.g_ab_0,
        sigma_m1=d.g_ab_m1,
        h_m3_remainder=remainder,
    )


def boosted_expansion(d: AHExpansionData, a: BoostVector):
    """Leading and subleading coefficients of ``|H| = 2/R + h/R^2`` on the foliation ``r = R Ft``.

    ``h = -m / Ft^3`` with ``1/Ft = a0 + a . X``.
    """
    m = mass_aspect(d)
    lin = a.linear_function(d.grid)
    return ScalarField.constant(d.grid, 2.0), -m * lin ** 3


def gauss_curvature_check(a: BoostVector, band_limit=32):
    """Residual ``(1 - lap ln Ft) / Ft^2 - 1`` of the constant-curvature identity of ``Ft^2 sigma~``."""
    grid = sphere_grid(band_limit)
    lin = a.linear_function(grid)
    return lin * lin * (1.0 + laplacian(ScalarField(grid, np.log(lin.values)))) - 1.0


# -- linearized isometric embedding --------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmbeddingLinearization:
    """Solution of the linearized embedding system.

    ``T_ab = dX0 dX0 + g_ab_0``; ``P_a`` and ``F_pot`` solve
    ``curl P = 2 F`` and ``P = rot(W/2 + grad F)`` with ``W_c = eps^{ad} nabla_d T_ac``.
    """

    X0_0: ScalarField
    T_ab: SymTensorField
    F_pot: ScalarField
    P_a: OneFormField
    h0_m3: ScalarField
    compatibility_residual: float


def solve_linearized_embedding(X0_0: ScalarField, g0: SymTensorField, tol=1e-8):
    """Solve for ``(F, P_a)`` and return ``h0_m3 = -div P + tr T / 2 - (lap X0)^2 / 4``.

    Substituting ``P`` into ``curl P = 2F`` gives ``(lap + 2) F = -div W / 2``.
    The ``l = 1`` part of ``div W`` vanishes for every symmetric ``T``, so the
    equation is solvable; the ``l = 1`` modes of ``F`` are gauge and set to zero.
    Raises :class:`SolverFailure` if ``div W`` has ``l = 1`` content above ``tol``.
    """
    grid = X0_0.grid
    dX = gradient(X0_0)
    T = SymTensorField.outer(dX) + g0
    W = tensor_curl(T)
    div_w = divergence(W)
    spec = analyze(div_w)
    scale = max(1.0, div_w.sup())
    dipole = spec.coeffs[1:4]
    if np.any(np.abs(dipole) > tol * scale):
        raise SolverFailure(f"div W has l=1 content {np.max(np.abs(dipole)):.3e}; "
                            "the compatibility system is singular")
    l = np.arange(grid.L + 1, dtype=float)
    shift = 2.0 - l * (l + 1.0)
    inv = np.zeros_like(shift)
    inv[l != 1] = 1.0 / shift[l != 1]
    F = synthesize(spec.scaled(-0.5 * inv), grid)
    P = (0.5 * W + gradient(F)).rotated()
    residual = (curl(P) - 2.0 * F).sup()
    if residual > tol * scale:
        raise SolverFailure(f"compatibility residual {residual:.3e} exceeds {tol:g}")
    lap_x = laplacian(X0_0)
    h0 = -divergence(P) + 0.5 * trace(T) - 0.25 * lap_x * lap_x
    return EmbeddingLinearization(X0_0, T, F, P, h0, residual)


# -- finite-radius oracle ---------------------------------------------------------------


def finite_r_mean_curvature(d: AHExpansionData, r: float) -> ScalarField:
    """``|H|`` of the coordinate sphere of radius ``r`` for the truncated metric.

    Frame matrices ``S = r^2 I + A`` (induced metric), ``A = g0 + g1/r + g2/r^2``,
    and ``P = p0 + p1/r + p2/r^2`` give

    ``<H, e3> = (tr(S^-1 dS/dr)/2 - div_S(S^-1 b)) / N``, ``<H, e4> = 2 + tr(S^-1 P)``,

    with ``b = g_ra_m3/r^3`` and ``N^2 = g_rr - b.S^-1.b``.  Both components are
    carried as deviations from 2, so ``|H|^2 = (H3 - H4)(H3 + H4)`` keeps full
    relative precision at large ``r``.
    """
    r = float(r)
    if not r >= MIN_RADIUS:
        raise ValueError(f"radius must be at least {MIN_RADIUS}, got {r}")
    grid = d.grid
    g0, g1, g2 = d.g_ab_0, d.g_ab_m1, d.g_ab_m2
    a_tt = g0.tt + g1.tt / r + g2.tt / r ** 2
    a_tp = g0.tp + g1.tp / r + g2.tp / r ** 2
    a_pp = g0.pp + g1.pp / r + g2.pp / r ** 2
    s_tt = r * r + a_tt
    s_pp = r * r + a_pp
    det = s_tt * s_pp - a_tp * a_tp
    if np.any(det <= 0):
        raise NonSpacelikeH(f"induced metric degenerate at r={r}")
    i_tt, i_tp, i_pp = s_pp / det, -a_tp / det, s_tt / det

    def tr_inv(m_tt, m_tp, m_pp):
        return i_tt * m_tt + 2.0 * i_tp * m_tp + i_pp * m_pp

    da_tt = -g1.tt / r ** 2 - 2.0 * g2.tt / r ** 3
    da_tp = -g1.tp / r ** 2 - 2.0 * g2.tp / r ** 3
    da_pp = -g1.pp / r ** 2 - 2.0 * g2.pp / r ** 3

    b_t = d.g_ra_m3.theta / r ** 3
    b_p = d.g_ra_m3.phi / r ** 3
    beta_t = i_tt * b_t + i_tp * b_p
    beta_p = i_tp * b_t + i_pp * b_p
    rho = np.sqrt(det)
    flux = divergence(OneFormField(grid, rho * beta_t, rho * beta_p)).values / rho

    q = -tr_inv(a_tt, a_tp, a_pp) / r + 0.5 * tr_inv(da_tt, da_tp, da_pp) - flux
    delta = (-1.0 / r ** 2 + d.g_rr_m5.values / r ** 3 + d.g_rr_m6.values / r ** 4
             - r * r * (b_t * beta_t + b_p * beta_p))
    if np.any(delta <= -1.0):
        raise NonSpacelikeH(f"radial normal is not spacelike at r={r}")
    eps = np.expm1(-0.5 * np.log1p(delta))
    h3 = 2.0 * eps + r * q * (1.0 + eps)

    p0, p1, p2 = d.p_ab_0, d.p_ab_m1, d.p_ab_m2
    h4 = tr_inv(p0.tt + p1.tt / r + p2.tt / r ** 2,
                p0.tp + p1.tp / r + p2.tp / r ** 2,
                p0.pp + p1.pp / r + p2.pp / r ** 2)
    h_sq = (h3 - h4) * (4.0 + h3 + h4)
    if np.any(h_sq <= 0):
        raise NonSpacelikeH(f"|H|^2 <= 0 at r={r} (min {np.min(h_sq):.3e}); data too large")
    return ScalarField(grid, np.sqrt(h_sq))


def hyperboloid_mean_curvature(r):
    """Closed form of :func:`finite_r_mean_curvature` for zero data: ``2 / sqrt(r^2 - 1)``."""
    return 2.0 / np.sqrt(r * r - 1.0)


@dataclass(frozen=True, eq=False)
class ExpansionFit:
    """Least-squares fit ``f(r) = sum_k c_k r^-k``."""

    orders: tuple
    radii: tuple
    coefficients: dict
    residuals: tuple         # max |f - fit| at each radius
    weighted_residuals: tuple  # residual times r^(max order)
    condition: float

    @property
    def max_residual(self):
        return max(self.residuals)


def extract_expansion(samples, orders=(2, 3, 4), known=None):
    """Fit sampled fields in powers of ``1/r``.

    ``samples`` is a sequence of ``(r, ScalarField)``; ``known`` maps orders to
    coefficients (scalars or fields) that are subtracted before fitting, e.g.
    ``{1: 2.0}`` for the leading term of ``|H|``.  The Vandermonde columns are
    scaled to unit norm before the condition number is checked.
    """
    orders = tuple(int(k) for k in orders)
    known = dict(known or {})
    radii = np.array([float(r) for r, _ in samples])
    if len(set(radii)) != len(radii):
        raise IllConditionedFit("radii must be distinct")
    if len(radii) < len(orders) + 1:
        raise IllConditionedFit(f"{len(radii)} radii cannot fit {len(orders)} orders "
                                f"with a residual; need at least {len(orders) + 1}")
    if np.any(radii < MIN_RADIUS):
        raise ValueError(f"all radii must be at least {MIN_RADIUS}")
    grid = samples[0][1].grid
    V = radii[:, None] ** -np.array(orders, dtype=float)[None, :]
    col = np.linalg.norm(V, axis=0)
    Vs = V / col
    cond = float(np.linalg.cond(Vs))
    if not cond <= MAX_CONDITION:
        raise IllConditionedFit(f"condition number {cond:.3e} exceeds {MAX_CONDITION:g}")
    Y = []
    for r, f in samples:
        y = f.values.copy()
        for k, c in known.items():
            y = y - (c.values if isinstance(c, ScalarField) else float(c)) * r ** -float(k)
        Y.append(y.ravel())
    Y = np.array(Y)
    sol, *_ = np.linalg.lstsq(Vs, Y, rcond=None)
    coeffs = sol / col[:, None]
    resid = np.abs(Y - V @ coeffs).max(axis=1)
    return ExpansionFit(
        orders=orders,
        radii=tuple(radii),
        coefficients={k: ScalarField(grid, coeffs[i].reshape(grid.shape))
                      for i, k in enumerate(orders)},
        residuals=tuple(float(x) for x in resid),
        weighted_residuals=tuple(float(x * r ** max(orders)) for x, r in zip(resid, radii)),
        condition=cond,
    )


def sample_mean_curvature(d, radii):
    return [(r, finite_r_mean_curvature(d, r)) for r in radii]


def adjudicate_trace_variant(d: AHExpansionData, radii=(100.0, 200.0, 400.0, 800.0)):
    """Decide which trace term in ``h_m3`` the finite-radius oracle supports.

    Returns a dict with the sup-norm mismatch between the fitted ``r^-3``
    coefficient and each candidate (after adding the known remainder) and the
    selected variant.
    """
    fit = extract_expansion(sample_mean_curvature(d, radii), known={1: 2.0})
    h3 = fit.coefficients[3]
    errors = {}
    for v in TRACE_VARIANTS:
        exp = coordinate_sphere_expansion(d, v)
        errors[v] = (h3 - exp.h_m3_truncated).sup()
    selected = min(errors, key=errors.get)
    return {"errors": errors, "selected": selected, "fit_residual": fit.max_residual}

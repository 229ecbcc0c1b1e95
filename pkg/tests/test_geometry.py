import math
from dataclasses import replace

import numpy as np
import pytest

from ahconserved import (
    AHExpansionData,
    BoostVector,
    IllConditionedFit,
    NonSpacelikeH,
    boosted_expansion,
    coordinate_sphere_expansion,
    extract_expansion,
    finite_r_mean_curvature,
    gauss_curvature_check,
    generate,
    mass_aspect,
    solve_linearized_embedding,
)
from ahconserved.data import _random_traceless
from ahconserved.geometry import (
    adjudicate_trace_variant,
    h_m3_combination,
    hyperboloid_mean_curvature,
    sample_mean_curvature,
)
from ahconserved.sphere import (
    ScalarField,
    SymTensorField,
    YlmSpectrum,
    coordinate_functions,
    divergence,
    gradient,
    harmonic,
    integrate,
    laplacian,
    sphere_grid,
    synthesize,
)

GRID = sphere_grid(32)
RADII = (100.0, 200.0, 400.0, 800.0)


# -- coordinate spheres -------------------------------------------------------------------


def test_zero_data_expansion_is_zero():
    exp = coordinate_sphere_expansion(AHExpansionData.zeros(GRID))
    for f in (exp.h_m2, exp.h_m3, exp.alpha_m1, exp.alpha_m2_curl, exp.sigma_0, exp.sigma_m1):
        assert f.sup() == 0.0
    # the truncated g_rr still contributes at order r^-3
    assert np.all(exp.h_m3_remainder.values == 1.0)


def test_expansion_leading_terms(random_data):
    d = random_data
    exp = coordinate_sphere_expansion(d)
    m = mass_aspect(d)
    assert (exp.h_m2 + m).sup() == 0.0
    assert (exp.alpha_m1 - 0.5 * gradient(m)).sup() < 1e-15
    assert (exp.h_m3 + h_m3_combination(d) + 0.25 * m * m).sup() < 1e-15


def test_trace_variant_argument():
    with pytest.raises(ValueError):
        coordinate_sphere_expansion(AHExpansionData.zeros(GRID), "g_m3")


# -- boosted foliations ----------------------------------------------------------------------


def test_boost_identity_reduces_to_coordinate_spheres(random_data):
    lead, sub = boosted_expansion(random_data, BoostVector.identity())
    assert np.all(lead.values == 2.0)
    assert (sub - coordinate_sphere_expansion(random_data).h_m2).sup() < 1e-15


def test_boost_of_zero_data():
    _, sub = boosted_expansion(AHExpansionData.zeros(GRID), BoostVector.from_rapidity(0.8, (1, 2, 3)))
    assert sub.sup() == 0.0


@pytest.mark.parametrize("beta", [0.3, 1.0, -0.7])
def test_boosted_schwarzschild_pointwise(beta):
    d = generate("schwarzschild_aspect", 32, m0=1.0)
    _, sub = boosted_expansion(d, BoostVector.from_rapidity(beta))
    th, _ = GRID.mesh()
    expected = -2.0 * (math.cosh(beta) + math.sinh(beta) * np.cos(th)) ** 3
    assert np.max(np.abs(sub.values - expected)) < 1e-12 * np.max(np.abs(expected))


def test_gauss_curvature_identity_boost():
    assert gauss_curvature_check(BoostVector.identity()).sup() == 0.0


def test_gauss_curvature_moderate_boost():
    assert gauss_curvature_check(BoostVector.from_rapidity(0.5), 32).sup() <= 1e-8


def test_gauss_curvature_strong_boost_needs_more_modes():
    a = BoostVector.from_rapidity(1.0)
    assert gauss_curvature_check(a, 48).sup() <= 1e-8
    assert gauss_curvature_check(a, 16).sup() > gauss_curvature_check(a, 48).sup()


# -- linearized embedding ------------------------------------------------------------------------


def _random_x0(seed, lmax=6):
    rng = np.random.default_rng(seed)
    c = np.zeros((GRID.L + 1) ** 2)
    n = (lmax + 1) ** 2
    c[4:n] = rng.standard_normal(n - 4) / np.arange(4, n)
    return synthesize(YlmSpectrum(GRID.L, c), GRID)


def test_linearized_embedding_trivial():
    lin = solve_linearized_embedding(ScalarField.zeros(GRID), SymTensorField.zeros(GRID))
    assert lin.F_pot.sup() == 0.0 and lin.P_a.sup() == 0.0 and lin.h0_m3.sup() == 0.0


def test_linearized_embedding_y20_moments():
    y = harmonic(GRID, 2, 0)
    lin = solve_linearized_embedding(y, SymTensorField.zeros(GRID))
    h = -(laplacian(y) + 2.0 * y)
    for x in coordinate_functions(GRID):
        assert abs(integrate(x * (lin.h0_m3 + 0.25 * h * h))) < 1e-12


@pytest.mark.parametrize("seed", range(4))
def test_linearized_embedding_divergence_identity(seed):
    rng = np.random.default_rng(100 + seed)
    X0 = _random_x0(seed)
    g0 = _random_traceless(rng, GRID, 6, 0.1)
    lin = solve_linearized_embedding(X0, g0)
    dX = gradient(X0)
    for x in coordinate_functions(GRID):
        lhs = integrate(x * divergence(lin.P_a))
        rhs = -0.5 * integrate(x * dX.dot(dX))
        assert abs(lhs - rhs) < 1e-8 * max(1.0, abs(rhs))
    assert lin.compatibility_residual < 1e-10


# -- finite-radius oracle ---------------------------------------------------------------------------


@pytest.mark.parametrize("r", [10.0, 100.0, 1e4])
def test_hyperboloid_closed_form(r):
    H = finite_r_mean_curvature(AHExpansionData.zeros(GRID), r)
    assert np.max(np.abs(H.values - hyperboloid_mean_curvature(r))) < 1e-12 * hyperboloid_mean_curvature(r)


def test_schwarzschild_subleading_coefficient():
    d = generate("schwarzschild_aspect", 32, m0=1.0)
    est = {}
    for r in (100.0, 200.0, 400.0):
        H = finite_r_mean_curvature(d, r).values
        est[r] = r * r * (H - 2.0 / r)
    # first-order Richardson extrapolation in 1/r
    rich = 2 * est[400.0] - est[200.0]
    assert np.max(np.abs(rich + 2.0)) < 2e-4
    assert np.max(np.abs(est[400.0] + 2.0)) < np.max(np.abs(est[100.0] + 2.0))


def test_finite_r_rejects_small_radius():
    with pytest.raises(ValueError):
        finite_r_mean_curvature(AHExpansionData.zeros(GRID), 5.0)


def test_finite_r_rejects_large_data():
    d = generate("random_bandlimited", 32, seed=1).scaled(2000.0)
    with pytest.raises(NonSpacelikeH):
        finite_r_mean_curvature(d, 10.0)


def test_expansion_bounded_at_third_order(random_data):
    d = random_data
    exp = coordinate_sphere_expansion(d)
    devs = []
    for r in RADII:
        H = finite_r_mean_curvature(d, r)
        third = r ** 3 * (H - 2.0 / r - exp.h_m2 / (r * r))
        devs.append((third - exp.h_m3_truncated).sup())
    assert max(devs) < 1.0
    assert devs[-1] < devs[0]


# -- fitting ----------------------------------------------------------------------------------------


def test_fit_of_zero_samples():
    samples = [(r, ScalarField.zeros(GRID)) for r in RADII]
    fit = extract_expansion(samples)
    assert all(c.sup() <= 1e-10 for c in fit.coefficients.values())


def test_fit_of_hyperboloid():
    # 2/sqrt(r^2 - 1) = 2/r + 1/r^3 + 3/(4 r^5) + ...; the r^-5 tail limits the fit
    fit = extract_expansion(sample_mean_curvature(AHExpansionData.zeros(GRID), RADII), known={1: 2.0})
    assert fit.coefficients[2].sup() < 1e-6
    assert np.max(np.abs(fit.coefficients[3].values - 1.0)) < 1e-4


def test_fit_of_exact_series():
    f2, f3, f4 = (ScalarField.constant(GRID, c) for c in (0.3, -1.2, 4.0))
    samples = [(r, f2 / r ** 2 + f3 / r ** 3 + f4 / r ** 4) for r in RADII]
    fit = extract_expansion(samples)
    assert (fit.coefficients[2] - f2).sup() < 1e-10
    assert (fit.coefficients[4] - f4).sup() < 1e-3
    assert fit.max_residual < 1e-15


@pytest.mark.parametrize("seed", range(3))
def test_fit_recovers_h_m2(seed):
    d = generate("random_bandlimited", 32, seed=seed)
    fit = extract_expansion(sample_mean_curvature(d, RADII), known={1: 2.0})
    assert (fit.coefficients[2] - coordinate_sphere_expansion(d).h_m2).sup() <= 1e-6
    assert max(fit.weighted_residuals) < 1.0


def test_fit_needs_enough_radii():
    s = sample_mean_curvature(AHExpansionData.zeros(GRID), (100.0, 200.0))
    with pytest.raises(IllConditionedFit):
        extract_expansion(s)


def test_fit_rejects_repeated_radii():
    s = sample_mean_curvature(AHExpansionData.zeros(GRID), (100.0, 100.0, 200.0, 400.0))
    with pytest.raises(IllConditionedFit):
        extract_expansion(s)


def test_fit_rejects_near_degenerate_radii():
    s = sample_mean_curvature(AHExpansionData.zeros(GRID), (100.0, 100.0 + 1e-9, 100.0 + 2e-9, 100.0 + 3e-9))
    with pytest.raises(IllConditionedFit):
        extract_expansion(s)


def test_adjudication_selects_g_m2(random_data):
    out = adjudicate_trace_variant(random_data)
    assert out["selected"] == "g_m2"
    assert out["errors"]["g_m2"] < 1e-2 * out["errors"]["g_m1"]


def test_adjudication_is_decisive_when_traces_differ():
    d = generate("random_bandlimited", 32, seed=9)
    d = replace(d, g_ab_m1=d.g_ab_m1 + SymTensorField.identity(GRID, 0.05))
    assert adjudicate_trace_variant(d)["selected"] == "g_m2"

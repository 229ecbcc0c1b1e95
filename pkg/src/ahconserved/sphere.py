"""Pseudo-spectral calculus on the unit round sphere.

Fields live on a Gauss-Legendre (colatitude) by equispaced (longitude) grid
with the poles excluded.  Vector and tensor fields are stored by their
components in the orthonormal frame ``(e_theta, e_phi)``; the area form has
``eps[theta, phi] = +1``.

Real spherical harmonics are orthonormal on the unit sphere and carry no
Condon-Shortley phase::

    Y_l0     = lam_l0(theta)
    Y_lm     = sqrt(2) lam_lm(theta) cos(m phi)     (m > 0)
    Y_l,-m   = sqrt(2) lam_lm(theta) sin(m phi)     (m > 0)

so that ``x = sqrt(4 pi / 3) Y_11``, ``y = sqrt(4 pi / 3) Y_1,-1`` and
``z = sqrt(4 pi / 3) Y_10``.

First-order operators acting on one-forms (divergence, curl) and the
second-order operators acting on symmetric tensors are evaluated weakly, by
quadrature against analytic derivatives of the harmonics.  This is exact for
band-limited integrands and never differentiates frame components through the
coordinate singularity at the poles.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "KernelObstruction",
    "SphereGrid",
    "ScalarField",
    "OneFormField",
    "SymTensorField",
    "YlmSpectrum",
    "sphere_grid",
    "integrate",
    "analyze",
    "synthesize",
    "laplacian",
    "gradient",
    "rot_gradient",
    "divergence",
    "curl",
    "hessian",
    "div_div",
    "tensor_curl",
    "invert_laplacian",
    "invert_shifted_bilaplacian",
    "trace",
    "norm_sq",
    "inner",
    "traceless_part",
    "coordinate_functions",
    "harmonic",
]


class KernelObstruction(ValueError):
    """Right-hand side has content in the kernel of the operator being inverted."""

    def __init__(self, message, coefficients):
        super().__init__(message)
        self.coefficients = np.asarray(coefficients)


class SphereGrid:
    """Gauss-Legendre x uniform-longitude grid for band limit ``L``.

    ``nlat = L + 1`` colatitude nodes and ``nlon = 2L + 2`` longitude nodes
    integrate products of two degree-``L`` harmonics exactly.  Instances are
    immutable; use :func:`sphere_grid` to share the Legendre tables.
    """

    def __init__(self, L):
        L = int(L)
        if L < 1:
            raise ValueError(f"band limit must be positive, got {L}")
        self.L = L
        self.nlat = L + 1
        self.nlon = 2 * L + 2
        x, w = _gauss_legendre(self.nlat)
        # colatitude increasing from north to south
        x, w = x[::-1], w[::-1]
        s = np.sqrt((1 - x) * (1 + x))
        self.cos_theta = x.astype(float)
        self.sin_theta = s.astype(float)
        self.theta = np.arctan2(s, x).astype(float)
        self.phi = 2.0 * np.pi * np.arange(self.nlon) / self.nlon
        self.lat_weights = w.astype(float)
        self.weights = np.outer(self.lat_weights, np.full(self.nlon, 2.0 * np.pi / self.nlon))
        self._build_tables(x, s)
        for arr in (self.cos_theta, self.theta, self.sin_theta, self.phi,
                    self.lat_weights, self.weights):
            arr.setflags(write=False)

    def __repr__(self):
        return f"SphereGrid(L={self.L}, nlat={self.nlat}, nlon={self.nlon})"

    def __eq__(self, other):
        return isinstance(other, SphereGrid) and other.L == self.L

    def __hash__(self):
        return hash(("SphereGrid", self.L))

    @property
    def shape(self):
        return (self.nlat, self.nlon)

    def mesh(self):
        """Return ``(theta, phi)`` arrays of shape ``(nlat, nlon)``."""
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    def _build_tables(self, c, s):
        # Normalized associated Legendre functions lam_lm(theta), their first
        # and second theta-derivatives, and mu_lm = lam_lm / sin(theta) with its
        # derivative (m >= 1 only).  Every table comes from the three-term
        # recurrence in l, differentiated term by term, so nothing is divided
        # by sin(theta) near the poles.
        # Built in extended precision, stored as float.
        L = self.L
        n = self.nlat
        lam = np.zeros((L + 1, L + 1, n), dtype=np.longdouble)
        dlam = np.zeros_like(lam)
        d2lam = np.zeros_like(lam)
        mu = np.zeros_like(lam)
        dmu = np.zeros_like(lam)

        one = np.longdouble(1)
        K = one / np.sqrt(4 * np.pi * one)
        for m in range(L + 1):
            if m > 0:
                K *= np.sqrt((2 * m + one) / (2 * m))
            sm = s ** m
            lam[m, m] = K * sm
            if m >= 1:
                sm1 = s ** (m - 1)
                mu[m, m] = K * sm1
                dlam[m, m] = K * m * sm1 * c
                d2lam[m, m] = K * m * ((m - 1) * (s ** (m - 2) if m >= 2 else 0.0) * c * c - sm)
                if m >= 2:
                    dmu[m, m] = K * (m - 1) * s ** (m - 2) * c

        for l in range(1, L + 1):
            m = np.arange(l).astype(np.longdouble)
            a = np.sqrt((4 * l * l - one) / (l * l - m * m))[:, None]
            b = np.sqrt(np.clip(((l - one) ** 2 - m * m) / (4 * (l - one) ** 2 - 1), 0, None))[:, None]
            p1, d1, dd1 = lam[l - 1, :l], dlam[l - 1, :l], d2lam[l - 1, :l]
            q1, dq1 = mu[l - 1, :l], dmu[l - 1, :l]
            if l >= 2:
                p2, d2, dd2 = lam[l - 2, :l], dlam[l - 2, :l], d2lam[l - 2, :l]
                q2, dq2 = mu[l - 2, :l], dmu[l - 2, :l]
            else:
                p2 = d2 = dd2 = q2 = dq2 = np.zeros((l, n), dtype=np.longdouble)
            lam[l, :l] = a * (c * p1 - b * p2)
            dlam[l, :l] = a * (c * d1 - s * p1 - b * d2)
            d2lam[l, :l] = a * (c * dd1 - 2.0 * s * d1 - c * p1 - b * dd2)
            mu[l, :l] = a * (c * q1 - b * q2)
            dmu[l, :l] = a * (c * dq1 - s * q1 - b * dq2)
        mu[:, 0] = 0.0
        dmu[:, 0] = 0.0

        self._lam = lam.astype(float)
        self._dlam = dlam.astype(float)
        self._d2lam = d2lam.astype(float)
        self._lam_sin = mu.astype(float)
        self._dlam_sin = dmu.astype(float)
        for arr in (self._lam, self._dlam, self._d2lam, self._lam_sin, self._dlam_sin):
            arr.setflags(write=False)

    # -- transform kernels on (C, S) coefficient matrices ---------------------
    # C[l, m] multiplies the cos-type harmonic (m >= 0), S[l, m] the sin-type
    # (m >= 1).  Tables already include the sqrt(2) for m > 0 via _norm.

    def _norm(self):
        n = np.full(self.L + 1, np.sqrt(2.0))
        n[0] = 1.0
        return n

    def _project(self, values, table):
        """Quadrature projections of grid values onto ``table * cos/sin(m phi)``."""
        F = np.fft.rfft(values, axis=1)[:, : self.L + 1] * (2.0 * np.pi / self.nlon)
        a = F.real * self.lat_weights[:, None]       # (nlat, m)
        b = -F.imag * self.lat_weights[:, None]
        norm = self._norm()
        C = np.einsum("lmj,jm->lm", table, a) * norm
        S = np.einsum("lmj,jm->lm", table, b) * norm
        S[:, 0] = 0.0
        return C, S

    def _expand(self, C, S, table):
        """Grid values of ``sum C table cos(m phi) + S table sin(m phi)``."""
        norm = self._norm()
        A = np.einsum("lm,lmj->jm", C * norm, table)
        B = np.einsum("lm,lmj->jm", S * norm, table)
        G = np.zeros((self.nlat, self.nlon // 2 + 1), dtype=complex)
        G[:, : self.L + 1] = (A - 1j * B) * (self.nlon / 2.0)
        G[:, 0] = A[:, 0] * self.nlon
        return np.fft.irfft(G, n=self.nlon, axis=1)


def _gauss_legendre(n):
    """Gauss-Legendre nodes and weights, Newton-polished in extended precision."""
    x = np.polynomial.legendre.leggauss(n)[0].astype(np.longdouble)

    def legendre(x):
        p0, p1 = np.ones_like(x), x
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        return p1, n * (x * p1 - p0) / (x * x - 1)

    for _ in range(3):
        p, dp = legendre(x)
        x = x - p / dp
    _, dp = legendre(x)
    return x, 2 / ((1 - x * x) * dp * dp)


@lru_cache(maxsize=16)
def sphere_grid(L):
    """Shared :class:`SphereGrid` for band limit ``L``."""
    return SphereGrid(L)


def _check(values, shape, name):
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{name}: expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: non-finite values")
    arr.setflags(write=False)
    return arr


def _same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check(self.values, self.grid.shape, "ScalarField"))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid, c):
        return cls(grid, np.full(grid.shape, float(c)))

    @classmethod
    def from_function(cls, grid, func):
        """Sample ``func(theta, phi)`` on the grid."""
        th, ph = grid.mesh()
        return cls(grid, np.broadcast_to(func(th, ph), grid.shape))

    def _wrap(self, values):
        return ScalarField(self.grid, values)

    def _other(self, other):
        if isinstance(other, ScalarField):
            _same_grid(self, other)
            return other.values
        return float(other)

    def __add__(self, other):
        return self._wrap(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.values - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.values)

    def __mul__(self, other):
        return self._wrap(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.values / self._other(other))

    def __neg__(self):
        return self._wrap(-self.values)

    def __pow__(self, p):
        return self._wrap(self.values ** p)

    def sup(self):
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class OneFormField:
    """One-form by its orthonormal-frame components ``(theta, phi)``."""

    grid: SphereGrid
    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _check(self.theta, self.grid.shape, "OneFormField.theta"))
        object.__setattr__(self, "phi", _check(self.phi, self.grid.shape, "OneFormField.phi"))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape), np.zeros(grid.shape))

    def components(self):
        return (self.theta, self.phi)

    def __add__(self, other):
        _same_grid(self, other)
        return OneFormField(self.grid, self.theta + other.theta, self.phi + other.phi)

    def __sub__(self, other):
        _same_grid(self, other)
        return OneFormField(self.grid, self.theta - other.theta, self.phi - other.phi)

    def __mul__(self, c):
        if isinstance(c, ScalarField):
            _same_grid(self, c)
            c = c.values
        return OneFormField(self.grid, self.theta * c, self.phi * c)

    __rmul__ = __mul__

    def __neg__(self):
        return OneFormField(self.grid, -self.theta, -self.phi)

    def rotated(self):
        """Rotate by a quarter turn: ``(w_theta, w_phi) -> (-w_phi, w_theta)``."""
        return OneFormField(self.grid, -self.phi, self.theta)

    def dot(self, other):
        _same_grid(self, other)
        return ScalarField(self.grid, self.theta * other.theta + self.phi * other.phi)

    def sup(self):
        return float(max(np.max(np.abs(self.theta)), np.max(np.abs(self.phi))))


@dataclass(frozen=True, eq=False)
class SymTensorField:
    """Symmetric 2-tensor by its frame components ``tt``, ``tp``, ``pp``."""

    grid: SphereGrid
    tt: np.ndarray
    tp: np.ndarray
    pp: np.ndarray

    def __post_init__(self):
        for name in ("tt", "tp", "pp"):
            object.__setattr__(self, name, _check(getattr(self, name), self.grid.shape,
                                                  f"SymTensorField.{name}"))

    @classmethod
    def zeros(cls, grid):
        z = np.zeros(grid.shape)
        return cls(grid, z, z, z)

    @classmethod
    def identity(cls, grid, c=1.0):
        """``c`` times the round metric."""
        one = np.full(grid.shape, float(c))
        return cls(grid, one, np.zeros(grid.shape), one)

    @classmethod
    def outer(cls, u, v=None):
        """Symmetrized product ``(u_a v_b + u_b v_a) / 2``."""
        v = u if v is None else v
        _same_grid(u, v)
        return cls(u.grid, u.theta * v.theta, 0.5 * (u.theta * v.phi + u.phi * v.theta),
                   u.phi * v.phi)

    def components(self):
        return (self.tt, self.tp, self.pp)

    def __add__(self, other):
        _same_grid(self, other)
        return SymTensorField(self.grid, self.tt + other.tt, self.tp + other.tp, self.pp + other.pp)

    def __sub__(self, other):
        _same_grid(self, other)
        return SymTensorField(self.grid, self.tt - other.tt, self.tp - other.tp, self.pp - other.pp)

    def __mul__(self, c):
        if isinstance(c, ScalarField):
            _same_grid(self, c)
            c = c.values
        return SymTensorField(self.grid, self.tt * c, self.tp * c, self.pp * c)

    __rmul__ = __mul__

    def __neg__(self):
        return SymTensorField(self.grid, -self.tt, -self.tp, -self.pp)

    def rotated(self):
        """Quarter turn of the traceless part: ``(p, q) -> (-q, p)`` with ``p = (tt - pp)/2``, ``q = tp``."""
        half = 0.5 * (self.tt - self.pp)
        return SymTensorField(self.grid, -self.tp, half, self.tp)

    def sup(self):
        return float(max(np.max(np.abs(c)) for c in self.components()))


@dataclass(frozen=True, eq=False)
class YlmSpectrum:
    """Real harmonic coefficients, flat index ``l*l + l + m``."""

    L: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != ((self.L + 1) ** 2,):
            raise ValueError(f"expected {(self.L + 1) ** 2} coefficients for L={self.L}, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @staticmethod
    def index(l, m):
        if abs(m) > l:
            raise IndexError(f"|m| > l for (l, m) = ({l}, {m})")
        return l * l + l + m

    def __getitem__(self, lm):
        l, m = lm
        if l > self.L:
            return 0.0
        return float(self.coeffs[self.index(l, m)])

    @classmethod
    def zeros(cls, L):
        return cls(L, np.zeros((L + 1) ** 2))

    @classmethod
    def from_cs(cls, C, S):
        L = C.shape[0] - 1
        out = np.zeros((L + 1) ** 2)
        for l in range(L + 1):
            out[l * l + l] = C[l, 0]
            ms = np.arange(1, l + 1)
            out[l * l + l + ms] = C[l, ms]
            out[l * l + l - ms] = S[l, ms]
        return cls(L, out)

    def to_cs(self):
        L = self.L
        C = np.zeros((L + 1, L + 1))
        S = np.zeros((L + 1, L + 1))
        for l in range(L + 1):
            C[l, 0] = self.coeffs[l * l + l]
            ms = np.arange(1, l + 1)
            C[l, ms] = self.coeffs[l * l + l + ms]
            S[l, ms] = self.coeffs[l * l + l - ms]
        return C, S

    def degrees(self):
        """Degree ``l`` of every flat index."""
        return np.concatenate([np.full(2 * l + 1, l) for l in range(self.L + 1)])

    def scaled(self, factors):
        """Multiply each coefficient by ``factors[l]``."""
        return YlmSpectrum(self.L, self.coeffs * np.asarray(factors, dtype=float)[self.degrees()])

    def __add__(self, other):
        if other.L != self.L:
            raise ValueError("band-limit mismatch")
        return YlmSpectrum(self.L, self.coeffs + other.coeffs)

    def __sub__(self, other):
        if other.L != self.L:
            raise ValueError("band-limit mismatch")
        return YlmSpectrum(self.L, self.coeffs - other.coeffs)

    def __mul__(self, c):
        return YlmSpectrum(self.L, self.coeffs * float(c))

    __rmul__ = __mul__

    def low_modes(self, lmax=1):
        """Coefficients with ``l <= lmax`` in flat order."""
        return self.coeffs[: (lmax + 1) ** 2].copy()


# -- scalar transforms --------------------------------------------------------


def integrate(f):
    """Quadrature of a scalar field over the unit sphere."""
    return float(np.sum(f.grid.weights * f.values))


def analyze(f, L=None):
    """Harmonic coefficients of ``f`` up to degree ``L`` (default: grid band limit)."""
    grid = f.grid
    L = grid.L if L is None else int(L)
    if L > grid.L:
        raise ValueError(f"band limit {L} exceeds grid band limit {grid.L}")
    C, S = grid._project(f.values, grid._lam)
    return YlmSpectrum.from_cs(C[: L + 1, : L + 1], S[: L + 1, : L + 1])


def _pad_cs(spec, grid):
    if spec.L > grid.L:
        raise ValueError(f"spectrum band limit {spec.L} exceeds grid band limit {grid.L}")
    C, S = spec.to_cs()
    Cg = np.zeros((grid.L + 1, grid.L + 1))
    Sg = np.zeros_like(Cg)
    Cg[: spec.L + 1, : spec.L + 1] = C
    Sg[: spec.L + 1, : spec.L + 1] = S
    return Cg, Sg


def synthesize(spec, grid):
    """Grid values of a harmonic series."""
    C, S = _pad_cs(spec, grid)
    return ScalarField(grid, grid._expand(C, S, grid._lam))


def harmonic(grid, l, m):
    """The real harmonic ``Y_lm`` sampled on ``grid``."""
    spec = np.zeros((grid.L + 1) ** 2)
    spec[YlmSpectrum.index(l, m)] = 1.0
    return synthesize(YlmSpectrum(grid.L, spec), grid)


def coordinate_functions(grid):
    """The restrictions ``(x, y, z)`` of the Cartesian coordinates to the sphere."""
    th, ph = grid.mesh()
    st = np.sin(th)
    return (ScalarField(grid, st * np.cos(ph)), ScalarField(grid, st * np.sin(ph)),
            ScalarField(grid, np.cos(th)))


def _denoise(spec):
    """Zero coefficients at the round-off floor before second-order differentiation.

    Transform round-off (~1e-16 relative) would otherwise be amplified by
    ``l(l+1)`` across every mode.
    """
    c = spec.coeffs
    floor = 16.0 * np.finfo(float).eps * np.max(np.abs(c), initial=0.0)
    return YlmSpectrum(spec.L, np.where(np.abs(c) > floor, c, 0.0))


def _ell_factor(L):
    l = np.arange(L + 1, dtype=float)
    return l * (l + 1.0)


def laplacian(f):
    """Laplace-Beltrami operator; ``Y_lm`` has eigenvalue ``-l(l+1)``."""
    spec = _denoise(analyze(f))
    return synthesize(spec.scaled(-_ell_factor(spec.L)), f.grid)


def invert_laplacian(f):
    """Solution ``u`` of ``lap u = f - mean(f)`` with zero mean."""
    spec = analyze(f)
    ll = _ell_factor(spec.L)
    inv = np.zeros_like(ll)
    inv[1:] = -1.0 / ll[1:]
    return synthesize(spec.scaled(inv), f.grid)


def invert_shifted_bilaplacian(f, tol=1e-10):
    """Solve ``lap (lap + 2) u = f`` with the ``l <= 1`` part of ``u`` set to zero.

    Raises :class:`KernelObstruction` if ``f`` has ``l <= 1`` content above
    ``tol * max|f|``.
    """
    spec = analyze(f)
    low = spec.low_modes(1)
    scale = f.sup()
    if np.any(np.abs(low) > tol * scale):
        raise KernelObstruction(
            f"l<=1 content {np.max(np.abs(low)):.3e} exceeds {tol:g} * {scale:.3e}", low)
    ll = _ell_factor(spec.L)
    inv = np.zeros_like(ll)
    inv[2:] = 1.0 / (ll[2:] * (ll[2:] - 2.0))
    return synthesize(spec.scaled(inv), f.grid)


# -- first-order operators ------------------------------------------------------


def gradient(f):
    """Frame components ``(d_theta f, d_phi f / sin theta)`` of the gradient."""
    grid = f.grid
    C, S = _pad_cs(analyze(f), grid)
    m = np.arange(grid.L + 1, dtype=float)[None, :]
    gt = grid._expand(C, S, grid._dlam)
    gp = grid._expand(m * S, -m * C, grid._lam_sin)
    return OneFormField(grid, gt, gp)


def rot_gradient(f):
    """Rotated gradient ``eps . grad f`` with components ``(-grad_phi f, grad_theta f)``.

    Divergence free, and ``curl(rot_gradient(f)) = -laplacian(f)``.
    """
    return gradient(f).rotated()


def _weak_div_cs(w):
    grid = w.grid
    m = np.arange(grid.L + 1, dtype=float)[None, :]
    Ct, St = grid._project(w.theta, grid._dlam)
    Cp, Sp = grid._project(w.phi, grid._lam_sin)
    return -Ct + m * Sp, -(St + m * Cp)


def _weak_curl_cs(w):
    grid = w.grid
    m = np.arange(grid.L + 1, dtype=float)[None, :]
    Cq, Sq = grid._project(w.theta, grid._lam_sin)
    Cr, Sr = grid._project(w.phi, grid._dlam)
    return m * Sq + Cr, Sr - m * Cq


def divergence(w):
    """Divergence ``nabla^a w_a`` from ``<Y, div w> = -int grad Y . w``."""
    C, S = _weak_div_cs(w)
    S[:, 0] = 0.0
    return ScalarField(w.grid, w.grid._expand(C, S, w.grid._lam))


def curl(w):
    """Curl ``eps^{ab} nabla_b w_a`` from ``<Y, curl w> = -int eps^{ab} nabla_b Y w_a``."""
    C, S = _weak_curl_cs(w)
    S[:, 0] = 0.0
    return ScalarField(w.grid, w.grid._expand(C, S, w.grid._lam))


# -- second-order tensor operators ------------------------------------------------


def hessian(f):
    """Covariant Hessian of a scalar field as a :class:`SymTensorField`."""
    grid = f.grid
    C, S = _pad_cs(_denoise(analyze(f)), grid)
    m = np.arange(grid.L + 1, dtype=float)[None, :]
    htt = grid._expand(C, S, grid._d2lam)
    htp = grid._expand(m * S, -m * C, grid._dlam_sin)
    lap = grid._expand(C * -_ell_factor(grid.L)[:, None], S * -_ell_factor(grid.L)[:, None],
                       grid._lam)
    return SymTensorField(grid, htt, htp, lap - htt)


def _hessian_pairing_cs(grid, a, b, c):
    """Projections ``int (H_tt a + H_tp b + H_pp c)`` against every harmonic."""
    m = np.arange(grid.L + 1, dtype=float)[None, :]
    ll = _ell_factor(grid.L)[:, None]
    C1, S1 = grid._project(a - c, grid._d2lam)
    C2, S2 = grid._project(b, grid._dlam_sin)
    C3, S3 = grid._project(c, grid._lam)
    C = C1 - m * S2 - ll * C3
    S = S1 + m * C2 - ll * S3
    S[:, 0] = 0.0
    return C, S


def div_div(T):
    """Double divergence ``nabla^a nabla^b T_ab``, weakly: ``<Y, .> = int <hess Y, T>``."""
    C, S = _hessian_pairing_cs(T.grid, T.tt, 2.0 * T.tp, T.pp)
    return ScalarField(T.grid, T.grid._expand(C, S, T.grid._lam))


def tensor_curl(T):
    """The one-form ``W_c = eps^{ad} nabla_d T_ac``.

    Its divergence and curl are computed weakly,
    ``<Y, div W> = int [H_tp (T_tt - T_pp) + T_tp (H_pp - H_tt)]`` and
    ``curl W = lap(tr T) - div div T``, and ``W`` is rebuilt from the two
    potentials (the sphere carries no harmonic one-forms).
    """
    grid = T.grid
    Cd, Sd = _hessian_pairing_cs(grid, -T.tp, T.tt - T.pp, T.tp)
    div_w = ScalarField(grid, grid._expand(Cd, Sd, grid._lam))
    curl_w = laplacian(trace(T)) - div_div(T)
    a = invert_laplacian(div_w)
    b = -invert_laplacian(curl_w)
    return gradient(a) + rot_gradient(b)


# -- pointwise tensor algebra ----------------------------------------------------


def trace(T):
    return ScalarField(T.grid, T.tt + T.pp)


def norm_sq(T):
    return ScalarField(T.grid, T.tt ** 2 + 2.0 * T.tp ** 2 + T.pp ** 2)


def inner(T, U):
    """Pointwise ``T_ab U^ab``."""
    _same_grid(T, U)
    return ScalarField(T.grid, T.tt * U.tt + 2.0 * T.tp * U.tp + T.pp * U.pp)


def traceless_part(T):
    half = 0.5 * (T.tt + T.pp)
    return SymTensorField(T.grid, T.tt - half, T.tp, T.pp - half)

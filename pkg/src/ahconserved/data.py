"""Expansion-coefficient data for asymptotically hyperbolic initial data.

The metric and ``p = k - g`` are described near infinity by coefficient
fields on the unit sphere::

    g_rr = 1/r^2 - 1/r^4 + g_rr_m5/r^5 + g_rr_m6/r^6
    g_ra = g_ra_m3/r^3
    g_ab = r^2 sigma + g_ab_0 + g_ab_m1/r + g_ab_m2/r^2
    p_rr = p_rr_m4/r^4,  p_ra = p_ra_m3/r^3
    p_ab = p_ab_0 + p_ab_m1/r + p_ab_m2/r^2

with ``g_ab_0`` and ``p_ab_0`` traceless.  ``matter_F`` is the optional
matter flux amplitude entering the loss rate with matter.

Files are JSON documents::

    {"header": {"format_version": 1, "band_limit": L, "nlat": ..., "nlon": ...},
     "fields": {"g_rr_m5": {"values": [[...], ...]},
                "g_ra_m3": {"theta": [...], "phi": [...]},
                "g_ab_0": {"theta_theta": [...], "theta_phi": [...], "phi_phi": [...]},
                ...}}

Arrays are row-major (one row per colatitude, north to south) with every
number written to 17 significant digits.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .sphere import (
    OneFormField,
    ScalarField,
    SphereGrid,
    SymTensorField,
    YlmSpectrum,
    analyze,
    coordinate_functions,
    gradient,
    hessian,
    rot_gradient,
    sphere_grid,
    synthesize,
    trace,
    traceless_part,
)

FORMAT_VERSION = 1
TRACE_TOL = 1e-10

SCALAR_KEYS = ("values",)
ONEFORM_KEYS = ("theta", "phi")
TENSOR_KEYS = ("theta_theta", "theta_phi", "phi_phi")

KINDS = ("minkowski_hyperboloid", "schwarzschild_aspect", "random_bandlimited")


class DataFormatError(ValueError):
    """A data file could not be parsed or does not match the schema."""


@dataclass(frozen=True, eq=False)
class AHExpansionData:
    g_rr_m5: ScalarField
    g_rr_m6: ScalarField
    p_rr_m4: ScalarField  # stored, not used by any computed quantity
    g_ra_m3: OneFormField
    p_ra_m3: OneFormField
    g_ab_0: SymTensorField
    g_ab_m1: SymTensorField
    g_ab_m2: SymTensorField
    p_ab_0: SymTensorField
    p_ab_m1: SymTensorField
    p_ab_m2: SymTensorField
    matter_F: Optional[ScalarField] = None

    def __post_init__(self):
        grid = self.g_rr_m5.grid
        for name, f in self.items():
            if f.grid != grid:
                raise ValueError(f"field {name} is on {f.grid}, expected {grid}")

    @property
    def grid(self) -> SphereGrid:
        return self.g_rr_m5.grid

    def items(self):
        """``(name, field)`` pairs in declaration order, skipping an absent matter field."""
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                yield f.name, value

    def scaled(self, lam):
        """Every coefficient field multiplied by ``lam``."""
        return replace(self, **{name: f * lam for name, f in self.items()})

    @classmethod
    def zeros(cls, grid):
        s = ScalarField.zeros(grid)
        w = OneFormField.zeros(grid)
        t = SymTensorField.zeros(grid)
        return cls(s, s, s, w, w, t, t, t, t, t, t)


FIELD_KINDS = {
    "g_rr_m5": "scalar", "g_rr_m6": "scalar", "p_rr_m4": "scalar",
    "g_ra_m3": "oneform", "p_ra_m3": "oneform",
    "g_ab_0": "tensor", "g_ab_m1": "tensor", "g_ab_m2": "tensor",
    "p_ab_0": "tensor", "p_ab_m1": "tensor", "p_ab_m2": "tensor",
    "matter_F": "scalar",
}
REQUIRED_FIELDS = tuple(k for k in FIELD_KINDS if k != "matter_F")


@dataclass(frozen=True)
class BoostVector:
    """Future-directed unit timelike vector ``(a0, a)``."""

    a0: float
    a: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if len(a) != 3:
            raise ValueError("boost vector needs three spatial components")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "a0", float(self.a0))
        if not self.a0 > 0:
            raise ValueError(f"boost vector must be future directed, got a0={self.a0}")
        norm = self.a0 ** 2 - sum(x * x for x in a)
        if abs(norm - 1.0) > 1e-12 * max(1.0, self.a0 ** 2):
            raise ValueError(f"boost vector must be unit timelike, a0^2 - |a|^2 = {norm!r}")

    @classmethod
    def identity(cls):
        return cls(1.0, (0.0, 0.0, 0.0))

    @classmethod
    def from_rapidity(cls, beta, axis=(0.0, 0.0, 1.0)):
        n = np.asarray(axis, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(math.cosh(beta), tuple(math.sinh(beta) * n))

    @classmethod
    def from_velocity(cls, v):
        """Normalize a spatial vector ``v`` (the boost with ``a = v``)."""
        v = np.asarray(v, dtype=float)
        return cls(math.sqrt(1.0 + float(v @ v)), tuple(v))

    def as_array(self):
        return np.array((self.a0,) + self.a)

    def linear_function(self, grid):
        """``a0 + sum_i a^i X^i``, the reciprocal of the boost conformal factor."""
        x, y, z = coordinate_functions(grid)
        return self.a0 + self.a[0] * x + self.a[1] * y + self.a[2] * z


def validate(d: AHExpansionData, tol=TRACE_TOL):
    """List of violated invariants, each a dict with ``check``, ``field``, ``max_violation``.

    An empty list means the data is admissible.
    """
    report = []
    for name in ("g_ab_0", "p_ab_0"):
        err = trace(getattr(d, name)).sup()
        if err > tol:
            report.append({"check": "traceless", "field": name, "max_violation": err})
    for name, f in d.items():
        if f.grid != d.grid:
            report.append({"check": "shared_grid", "field": name, "max_violation": math.inf})
    return report


# -- generators -------------------------------------------------------------------


def _random_scalar(rng, grid, lmax, amplitude, lmin=0):
    """Smooth random field: Gaussian coefficients decaying like ``1/(1+l)^2``."""
    spec = np.zeros((grid.L + 1) ** 2)
    n = (lmax + 1) ** 2
    l = np.concatenate([np.full(2 * k + 1, k) for k in range(lmax + 1)])
    coeffs = rng.standard_normal(n) / (1.0 + l) ** 2
    coeffs[l < lmin] = 0.0
    spec[:n] = coeffs
    f = synthesize(YlmSpectrum(grid.L, spec), grid)
    scale = f.sup()
    return f * (amplitude / scale) if scale > 0 else f


def _random_oneform(rng, grid, lmax, amplitude):
    a = _random_scalar(rng, grid, lmax, amplitude, lmin=1)
    b = _random_scalar(rng, grid, lmax, amplitude, lmin=1)
    return gradient(a) + rot_gradient(b)


def _random_traceless(rng, grid, lmax, amplitude):
    u = _random_scalar(rng, grid, lmax, amplitude, lmin=2)
    v = _random_scalar(rng, grid, lmax, amplitude, lmin=2)
    return traceless_part(hessian(u)) + traceless_part(hessian(v)).rotated()


def _random_tensor(rng, grid, lmax, amplitude):
    t = _random_scalar(rng, grid, lmax, amplitude)
    return _random_traceless(rng, grid, lmax, amplitude) + SymTensorField.identity(grid) * t


def _remove_dipole(f):
    spec = analyze(f)
    low = np.zeros_like(spec.coeffs)
    low[1:4] = spec.coeffs[1:4]
    return f - synthesize(YlmSpectrum(spec.L, low), f.grid)


def generate(kind, band_limit=32, *, m0=1.0, seed=0, lmax=6, amplitude=0.05,
             zero_momentum=False, matter=False):
    """Synthetic datasets.

    ``minkowski_hyperboloid``
        every coefficient zero.
    ``schwarzschild_aspect``
        ``g_rr_m5 = 2 m0``, everything else zero.
    ``random_bandlimited``
        smooth random fields of degree at most ``lmax`` and size about
        ``amplitude``; the leading tensors are traceless.  ``zero_momentum``
        removes the dipole of the mass aspect through ``g_rr_m5``;
        ``matter`` adds a random ``matter_F``.
    """
    grid = sphere_grid(band_limit)
    if kind == "minkowski_hyperboloid":
        return AHExpansionData.zeros(grid)
    if kind == "schwarzschild_aspect":
        return replace(AHExpansionData.zeros(grid), g_rr_m5=ScalarField.constant(grid, 2.0 * m0))
    if kind != "random_bandlimited":
        raise ValueError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    if not 1 <= lmax <= grid.L // 2 - 1:
        # quadratic quantities (loss rates, embedding data) need 2*lmax < L
        raise ValueError(f"lmax must lie in [1, {grid.L // 2 - 1}] for band limit {grid.L}")
    rng = np.random.default_rng(seed)
    s = lambda: _random_scalar(rng, grid, lmax, amplitude)
    w = lambda: _random_oneform(rng, grid, lmax, amplitude)
    d = AHExpansionData(
        g_rr_m5=s(), g_rr_m6=s(), p_rr_m4=s(),
        g_ra_m3=w(), p_ra_m3=w(),
        g_ab_0=_random_traceless(rng, grid, lmax, amplitude),
        g_ab_m1=_random_tensor(rng, grid, lmax, amplitude),
        g_ab_m2=_random_tensor(rng, grid, lmax, amplitude),
        p_ab_0=_random_traceless(rng, grid, lmax, amplitude),
        p_ab_m1=_random_tensor(rng, grid, lmax, amplitude),
        p_ab_m2=_random_tensor(rng, grid, lmax, amplitude),
        matter_F=s() if matter else None,
    )
    if zero_momentum:
        from .conserved import mass_aspect

        m = mass_aspect(d)
        d = replace(d, g_rr_m5=d.g_rr_m5 - (m - _remove_dipole(m)))
    return d


# -- file I/O -----------------------------------------------------------------------


def _format_rows(arr, indent):
    pad = " " * indent
    rows = (pad + "[" + ", ".join(format(v, ".17g") for v in row) + "]" for row in arr)
    return "[\n" + ",\n".join(rows) + "\n" + " " * (indent - 2) + "]"


def _components(kind, f):
    if kind == "scalar":
        return {"values": f.values}
    if kind == "oneform":
        return {"theta": f.theta, "phi": f.phi}
    return {"theta_theta": f.tt, "theta_phi": f.tp, "phi_phi": f.pp}


def _field_kind(f):
    if isinstance(f, ScalarField):
        return "scalar"
    if isinstance(f, OneFormField):
        return "oneform"
    if isinstance(f, SymTensorField):
        return "tensor"
    raise TypeError(f"not a field: {type(f).__name__}")


def dumps_fields(named, grid):
    """Serialize ``{name: field}`` in the data-file dialect."""
    header = {"format_version": FORMAT_VERSION, "band_limit": grid.L,
              "nlat": grid.nlat, "nlon": grid.nlon}
    parts = ['{\n  "header": ' + json.dumps(header, sort_keys=True) + ',\n  "fields": {']
    blocks = []
    for name, f in named.items():
        comps = _components(_field_kind(f), f)
        inner = ",\n".join(f'      "{k}": {_format_rows(v, 8)}' for k, v in comps.items())
        blocks.append(f'    "{name}": {{\n{inner}\n    }}')
    parts.append(",\n".join(blocks))
    parts.append("  }\n}\n")
    return "\n".join(parts)


def write_fields(named, path):
    grid = next(iter(named.values())).grid
    Path(path).write_text(dumps_fields(named, grid), encoding="utf-8")


def write_data(d: AHExpansionData, path):
    write_fields(dict(d.items()), path)


def _check_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise DataFormatError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise DataFormatError(f"{where}: unknown key(s) {', '.join(map(repr, unknown))}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise DataFormatError(f"{where}: missing required key(s) {', '.join(map(repr, missing))}")


def _array(value, grid, where):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DataFormatError(f"{where}: not a numeric array ({exc})") from None
    if arr.shape != grid.shape:
        raise DataFormatError(f"{where}: expected shape {grid.shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataFormatError(f"{where}: non-finite values")
    return arr


def _build(kind, block, grid, name):
    keys = {"scalar": SCALAR_KEYS, "oneform": ONEFORM_KEYS, "tensor": TENSOR_KEYS}[kind]
    _check_keys(block, keys, keys, f"field {name!r}")
    arrs = [_array(block[k], grid, f"field {name!r}.{k}") for k in keys]
    if kind == "scalar":
        return ScalarField(grid, *arrs)
    if kind == "oneform":
        return OneFormField(grid, *arrs)
    return SymTensorField(grid, *arrs)


def loads_fields(text, kinds=None, required=()):
    """Parse a field document; ``kinds`` maps allowed names to field kinds."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _check_keys(doc, ("header", "fields"), ("header", "fields"), "document")
    header = doc["header"]
    hkeys = ("format_version", "band_limit", "nlat", "nlon")
    _check_keys(header, hkeys, hkeys, "header")
    if header["format_version"] != FORMAT_VERSION:
        raise DataFormatError(f"header: unsupported format_version {header['format_version']!r}")
    L = header["band_limit"]
    if not isinstance(L, int) or not 1 <= L <= 1024:
        raise DataFormatError(f"header: invalid band_limit {L!r}")
    grid = sphere_grid(L)
    if (header["nlat"], header["nlon"]) != (grid.nlat, grid.nlon):
        raise DataFormatError(
            f"header: grid mismatch, band_limit {L} needs nlat={grid.nlat}, nlon={grid.nlon}, "
            f"got nlat={header['nlat']}, nlon={header['nlon']}")
    blocks = doc["fields"]
    if kinds is None:
        if not isinstance(blocks, dict):
            raise DataFormatError("fields: expected an object")
        guess = {1: "scalar", 2: "oneform", 3: "tensor"}
        kinds = {k: guess.get(len(v) if isinstance(v, dict) else 0, "scalar") for k, v in blocks.items()}
    _check_keys(blocks, kinds, required, "fields")
    return grid, {name: _build(kinds[name], blocks[name], grid, name) for name in blocks}


def read_fields(path, kinds=None, required=()):
    return loads_fields(Path(path).read_text(encoding="utf-8"), kinds, required)[1]


def read_data(path) -> AHExpansionData:
    """Read a data file written by :func:`write_data`."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"not UTF-8 text: {exc}") from None
    _, named = loads_fields(text, FIELD_KINDS, REQUIRED_FIELDS)
    return AHExpansionData(**named)

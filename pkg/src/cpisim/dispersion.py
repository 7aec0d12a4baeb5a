"""Sellmeier refractive index and quadratic dispersion of optical glasses.

The quadratic dispersion strength used by the interferometer is
``epsilon = thickness * (1/2) d^2k/domega^2``, so that a slab multiplies a
spectrum by ``exp(i * epsilon * detuning**2)``.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .units import SPEED_OF_LIGHT

_NM2_PER_UM2 = 1e6
_NM_PER_MM = 1e6


@dataclass(frozen=True)
class MaterialModel:
    """Three-term Sellmeier glass, ``n^2 = 1 + sum B_i l^2 / (l^2 - C_i)``.

    ``c`` coefficients are in um^2; the valid range is in nm.
    """

    name: str
    b: tuple
    c: tuple
    valid_range: tuple = (300.0, 2500.0)

    def __post_init__(self):
        b = tuple(float(v) for v in self.b)
        c = tuple(float(v) for v in self.c)
        if len(b) != 3 or len(c) != 3:
            raise InvalidArgument("Sellmeier model needs exactly three (B, C) pairs")
        if any(v <= 0 for v in b + c):
            raise InvalidArgument(f"{self.name}: Sellmeier coefficients must be positive")
        lo, hi = (float(v) for v in self.valid_range)
        if not 0 < lo < hi:
            raise InvalidArgument(f"{self.name}: bad valid range {self.valid_range!r}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "valid_range", (lo, hi))

    def _check(self, wavelength):
        lam = np.asarray(wavelength, dtype=float)
        lo, hi = self.valid_range
        if np.any(~np.isfinite(lam)) or np.any(lam < lo) or np.any(lam > hi):
            raise InvalidArgument(
                f"{self.name}: wavelength outside valid range [{lo}, {hi}] nm"
            )
        lam2 = lam**2
        for ci in self.c:
            # too close to a resonance the expansion is meaningless
            if np.any(np.abs(lam2 - ci * _NM2_PER_UM2) < 1e-6 * ci * _NM2_PER_UM2):
                raise InvalidArgument(f"{self.name}: wavelength at a Sellmeier pole")
        return lam

    def _f_derivs(self, lam):
        """n^2 - 1 and its first two derivatives with respect to u = lambda^2 (nm^2)."""
        u = lam**2
        f = np.zeros_like(u)
        f1 = np.zeros_like(u)
        f2 = np.zeros_like(u)
        for bi, ci in zip(self.b, self.c):
            cn = ci * _NM2_PER_UM2
            d = u - cn
            f += bi * u / d
            f1 += -bi * cn / d**2
            f2 += 2.0 * bi * cn / d**3
        return f, f1, f2


BK7 = MaterialModel(
    "BK7",
    b=(1.03961212, 0.231792344, 1.01046945),
    c=(0.00600069867, 0.0200179144, 103.560653),
    valid_range=(300.0, 2500.0),
)


def refractive_index(material, wavelength):
    """Phase index at ``wavelength`` (nm)."""
    lam = material._check(wavelength)
    f, _, _ = material._f_derivs(lam)
    n2 = 1.0 + f
    if np.any(n2 <= 0):
        raise InvalidArgument(f"{material.name}: non-physical index at this wavelength")
    out = np.sqrt(n2)
    return float(out) if out.ndim == 0 else out


def _index_lambda_derivs(material, lam):
    f, f1, f2 = material._f_derivs(lam)
    n = np.sqrt(1.0 + f)
    dn2 = 2.0 * lam * f1
    d2n2 = 4.0 * lam**2 * f2 + 2.0 * f1
    dn = dn2 / (2.0 * n)
    d2n = (d2n2 - 2.0 * dn**2) / (2.0 * n)
    return n, dn, d2n


def gvd_per_mm(material, wavelength):
    """Quadratic dispersion coefficient ``(1/2) d^2k/domega^2`` in fs^2/mm.

    Uses ``d^2k/domega^2 = lambda^3 / (2 pi c^2) * d^2n/dlambda^2`` with the
    Sellmeier second derivative taken analytically.
    """
    lam = material._check(wavelength)
    _, _, d2n = _index_lambda_derivs(material, lam)
    k2 = lam**3 / (2.0 * np.pi * SPEED_OF_LIGHT**2) * d2n  # fs^2 / nm
    out = 0.5 * k2 * _NM_PER_MM
    return float(out) if out.ndim == 0 else out


def epsilon_for_thickness(material, wavelength, thickness):
    """Quadratic dispersion strength (fs^2) of ``thickness`` mm of material."""
    if not thickness >= 0:
        raise InvalidArgument(f"thickness must be non-negative, got {thickness!r}")
    if thickness == 0:
        return 0.0
    return float(thickness) * gvd_per_mm(material, wavelength)


@dataclass(frozen=True)
class DispersionSpec:
    material: MaterialModel = field(default=BK7)
    thickness: float = 0.0  # mm
    wavelength: float = 800.0  # nm, where the GVD is evaluated

    def __post_init__(self):
        if not self.thickness >= 0:
            raise InvalidArgument(f"thickness must be non-negative, got {self.thickness!r}")

    @property
    def epsilon(self):
        return epsilon_for_thickness(self.material, self.wavelength, self.thickness)


def parse_material(text):
    """Parse a material from ``key = value`` lines.

    Required keys: ``name``, ``B1``..``B3``, ``C1``..``C3`` (um^2); optional
    ``range_nm = lo, hi``. Blank lines and ``#`` comments are ignored.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.lower()] = val
    known = {"name", "b1", "b2", "b3", "c1", "c2", "c3", "range_nm"}
    unknown = set(values) - known
    if unknown:
        raise InvalidArgument(f"unknown material keys: {sorted(unknown)}")
    missing = known - {"range_nm"} - set(values)
    if missing:
        raise InvalidArgument(f"missing material keys: {sorted(missing)}")
    try:
        b = tuple(float(values[f"b{i}"]) for i in (1, 2, 3))
        c = tuple(float(values[f"c{i}"]) for i in (1, 2, 3))
        rng = (300.0, 2500.0)
        if "range_nm" in values:
            rng = tuple(float(v) for v in values["range_nm"].split(","))
    except ValueError as exc:
        raise InvalidArgument(f"bad numeric value in material file: {exc}") from None
    return MaterialModel(values["name"], b, c, rng)


def load_material(path):
    return parse_material(Path(path).read_text())


def format_material(material):
    lines = [f"name = {material.name}"]
    lines += [f"B{i} = {v!r}" for i, v in enumerate(material.b, 1)]
    lines += [f"C{i} = {v!r}" for i, v in enumerate(material.c, 1)]
    lines.append(f"range_nm = {material.valid_range[0]!r}, {material.valid_range[1]!r}")
    return "\n".join(lines) + "\n"


MATERIALS = {"BK7": BK7}

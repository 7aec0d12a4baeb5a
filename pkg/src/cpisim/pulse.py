"""Transform-limited Gaussian pulses and their linear / erf / super-erf chirps."""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import erf

from .errors import InvalidArgument, NotMeasurable
from .grid import Domain, Field, to_time
from .units import wavelength_to_omega

LN2 = np.log(2.0)
_SQRT_4LN2 = np.sqrt(4.0 * LN2)
_SQRT_PI = np.sqrt(np.pi)


class ChirpKind(Enum):
    LINEAR = "linear"
    ERF = "erf"
    SUPER_ERF = "super-erf"


@dataclass(frozen=True)
class PhaseProfile:
    """Spectral phase as a function of detuning from the carrier.

    ``a`` (fs^2) is used by the linear chirp; ``b`` (dimensionless) and
    ``sigma`` (fs) by erf and super-erf. Unused parameters stay at zero.
    """

    kind: ChirpKind
    a: float = 0.0
    b: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if not isinstance(self.kind, ChirpKind):
            object.__setattr__(self, "kind", ChirpKind(self.kind))
        if self.kind is ChirpKind.LINEAR:
            if not np.isfinite(self.a):
                raise InvalidArgument("linear chirp needs a finite A")
        else:
            if not np.isfinite(self.b):
                raise InvalidArgument("erf chirp needs a finite B")
            if not self.sigma > 0:
                raise InvalidArgument(f"{self.kind.value} chirp needs sigma > 0")

    @classmethod
    def linear(cls, a):
        return cls(ChirpKind.LINEAR, a=float(a))

    @classmethod
    def erf(cls, b, sigma):
        return cls(ChirpKind.ERF, b=float(b), sigma=float(sigma))

    @classmethod
    def super_erf(cls, b, sigma):
        return cls(ChirpKind.SUPER_ERF, b=float(b), sigma=float(sigma))

    def _x(self, detuning):
        return np.asarray(detuning, dtype=float) * self.sigma / _SQRT_4LN2

    def phase(self, detuning):
        """Spectral phase in radians; zero at zero detuning."""
        detuning = np.asarray(detuning, dtype=float)
        if self.kind is ChirpKind.LINEAR:
            return self.a * detuning**2
        x = self._x(detuning)
        return self.b * (np.expm1(-x * x) / _SQRT_PI + x * erf(x))

    def group_delay(self, detuning):
        """Analytic d(phase)/d(detuning), fs."""
        detuning = np.asarray(detuning, dtype=float)
        if self.kind is ChirpKind.LINEAR:
            return 2.0 * self.a * detuning
        return self.b * erf(self._x(detuning)) * self.sigma / _SQRT_4LN2

    def group_delay_slope(self, detuning):
        """Analytic d(group delay)/d(detuning), fs^2."""
        detuning = np.asarray(detuning, dtype=float)
        if self.kind is ChirpKind.LINEAR:
            return np.full_like(detuning, 2.0 * self.a)
        x = self._x(detuning)
        return self.b * (self.sigma / _SQRT_4LN2) ** 2 * 2.0 / _SQRT_PI * np.exp(-x * x)

    def is_zero(self):
        return (self.a if self.kind is ChirpKind.LINEAR else self.b) == 0.0


# Chirp parameters that stretch a 10 fs, 800 nm pulse to ~100 ps.
REFERENCE_CHIRPS = {
    ChirpKind.LINEAR: PhaseProfile.linear(180_337.0),
    ChirpKind.ERF: PhaseProfile.erf(8300.0, 10.0),
    ChirpKind.SUPER_ERF: PhaseProfile.super_erf(7450.0, 11.2),
}


@dataclass(frozen=True)
class PulseSpec:
    fwhm_t: float  # fs, transform-limited temporal intensity FWHM
    center_wavelength: float  # nm
    energy: float = 1.0

    def __post_init__(self):
        if not self.fwhm_t > 0:
            raise InvalidArgument(f"fwhm_t must be positive, got {self.fwhm_t!r}")
        if not self.center_wavelength > 0:
            raise InvalidArgument(
                f"center_wavelength must be positive, got {self.center_wavelength!r}"
            )
        if not self.energy >= 0:
            raise InvalidArgument("energy must be non-negative")

    @property
    def omega0(self):
        return float(wavelength_to_omega(self.center_wavelength))

    @property
    def spectral_fwhm(self):
        """Spectral-intensity FWHM in fs^-1 (time-bandwidth product 4 ln 2)."""
        return 4.0 * LN2 / self.fwhm_t

    def spectral_intensity(self, detuning):
        """Unnormalised Gaussian spectral intensity, peak 1."""
        detuning = np.asarray(detuning, dtype=float)
        return np.exp(-(detuning * self.fwhm_t) ** 2 / (4.0 * LN2))


def check_compatible(profile, pulse):
    """Raise if ``profile`` is not a valid chirp for ``pulse``.

    A super-erf chirp is only defined for sigma strictly above the pulse width.
    """
    if profile.kind is ChirpKind.SUPER_ERF and not profile.sigma > pulse.fwhm_t:
        raise InvalidArgument(
            f"super-erf sigma ({profile.sigma} fs) must exceed the pulse width "
            f"({pulse.fwhm_t} fs)"
        )


def gaussian_tl_pulse(spec, grid):
    """Transform-limited Gaussian pulse as a frequency-domain field.

    Spectral amplitudes are real and positive, normalised so that
    ``sum |E|^2 d_omega == spec.energy``.
    """
    omega0 = spec.omega0
    if abs(grid.omega_ref - omega0) > 1e-6 * omega0:
        raise InvalidArgument(
            f"grid omega_ref {grid.omega_ref} does not match the pulse carrier {omega0}"
        )
    nyquist = np.pi / grid.dt
    # spectral intensity at the band edge must be negligible (no aliasing)
    if (nyquist * spec.fwhm_t) ** 2 / (4.0 * LN2) < 28.0:
        raise InvalidArgument(
            f"pulse bandwidth {spec.spectral_fwhm:.4g} fs^-1 too wide for grid "
            f"Nyquist {nyquist:.4g} fs^-1"
        )
    if spec.spectral_fwhm < 4.0 * grid.d_omega:
        raise InvalidArgument("pulse bandwidth not resolved by the grid frequency step")
    amp = np.sqrt(spec.spectral_intensity(grid.detunings))
    norm = np.sqrt(np.sum(amp**2) * grid.d_omega)
    return Field(grid, Domain.FREQUENCY, amp * np.sqrt(spec.energy) / norm)


def phase_values(profile, grid):
    return profile.phase(grid.detunings)


def group_delay(profile, grid):
    return profile.group_delay(grid.detunings)


def apply_phase(field, profile, sign=1):
    """Multiply a spectrum by ``exp(i * sign * phase)``."""
    if field.domain is not Domain.FREQUENCY:
        raise InvalidArgument("apply_phase expects a frequency-domain field")
    if sign not in (1, -1):
        raise InvalidArgument(f"sign must be +1 or -1, got {sign!r}")
    if profile.is_zero():
        return field
    return field.replace(field.samples * np.exp(1j * sign * phase_values(profile, field.grid)))


def chirped_pulse(spec, profile, grid, sign=1):
    """Time-domain field of ``spec`` after applying ``profile``."""
    return to_time(apply_phase(gaussian_tl_pulse(spec, grid), profile, sign))


def linear_stretch_fwhm(fwhm_t, a):
    """Closed-form FWHM of a Gaussian pulse after quadratic phase ``a``."""
    return fwhm_t * np.sqrt(1.0 + (8.0 * LN2 * a / fwhm_t**2) ** 2)


def intensity_fwhm(intensity, axis):
    """Full width at half of the global maximum.

    Uses the outermost half-maximum crossings, each located by linear
    interpolation between the bracketing samples, so double-peaked profiles
    report their full extent.
    """
    y = np.asarray(intensity, dtype=float)
    x = np.asarray(axis, dtype=float)
    if y.shape != x.shape or y.ndim != 1 or y.size < 3:
        raise NotMeasurable("intensity and axis must be 1-D arrays of equal length >= 3")
    peak = y.max()
    if not peak > 0:
        raise NotMeasurable("intensity is identically zero")
    imax = int(np.argmax(y))
    if imax == 0 or imax == y.size - 1:
        raise NotMeasurable("maximum lies on the boundary of the axis")
    half = 0.5 * peak
    above = np.flatnonzero(y >= half)
    lo, hi = above[0], above[-1]
    if lo == 0 or hi == y.size - 1:
        raise NotMeasurable("half-maximum crossing lies outside the axis")
    x_lo = x[lo - 1] + (half - y[lo - 1]) * (x[lo] - x[lo - 1]) / (y[lo] - y[lo - 1])
    x_hi = x[hi] + (half - y[hi]) * (x[hi + 1] - x[hi]) / (y[hi + 1] - y[hi])
    return float(x_hi - x_lo)


def temporal_fwhm(field):
    """Intensity FWHM of a time-domain field, fs."""
    if field.domain is not Domain.TIME:
        raise InvalidArgument("temporal_fwhm expects a time-domain field")
    return intensity_fwhm(field.intensity, field.axis)

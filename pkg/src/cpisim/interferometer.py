"""Chirped-pulse and white-light interferometer signals.

The CPI chain for one delay ``tau``:

1. ``E_A = E exp(-i phi)``, ``E_C = E exp(+i phi)`` (oppositely chirped pair).
2. Beamsplitter: ``E_1 = (E_A + E_C)/sqrt(2)``, ``E_2 = (E_A - E_C)/sqrt(2)``.
3. Arm 1 gets ``exp(i eps detuning^2)``, arm 2 gets ``exp(i detuning tau)``.
4. ``E_SFG(t) = E_1(t) E_2(t)``; the detected spectrum is ``|F[E_SFG]|^2``.

The carrier part of the delay phase, ``exp(i omega_0 tau)``, is a constant
factor on ``E_2`` and drops out of ``|E_SFG|^2``, so working with envelopes
is exact here.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .dispersion import DispersionSpec
from .errors import InvalidArgument
from .grid import Domain, Field, frequency_to_time, linear_phase, time_to_frequency
from .pulse import (
    LN2,
    ChirpKind,
    PhaseProfile,
    PulseSpec,
    apply_phase,
    check_compatible,
    gaussian_tl_pulse,
    intensity_fwhm,
)
from .units import omega_to_wavelength, wavelength_to_omega

DEFAULT_FILTER_CENTER = 400.0  # nm
DEFAULT_FILTER_WIDTH = 1.0  # nm


def default_delays(tau_min=-25.0, tau_max=25.0, step=0.5):
    """Inclusive, evenly stepped delay axis (101 points by default)."""
    if step <= 0 or tau_max < tau_min:
        raise InvalidArgument("delay range needs step > 0 and tau_max >= tau_min")
    n = int(round((tau_max - tau_min) / step)) + 1
    return tau_min + step * np.arange(n)


def _parallel_map(fn, items, threads):
    if threads is None or threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True, eq=False)
class CpiSetup:
    chirp: PhaseProfile
    pulse: PulseSpec
    grid: object  # SampleGrid
    dispersion: DispersionSpec = field(default_factory=DispersionSpec)

    def __post_init__(self):
        check_compatible(self.chirp, self.pulse)
        extent = chirped_extent(self.chirp, self.pulse)
        if self.grid.time_span < 2.0 * extent:
            raise InvalidArgument(
                f"time window {self.grid.time_span:.4g} fs is less than twice the "
                f"chirped pulse extent {extent:.4g} fs"
            )

    @property
    def epsilon(self):
        return self.dispersion.epsilon

    def with_dispersion(self, dispersion):
        return CpiSetup(self.chirp, self.pulse, self.grid, dispersion)

    @cached_property
    def arms(self):
        """Arm-1 time envelope (dispersed) and arm-2 spectrum (undelayed)."""
        e = gaussian_tl_pulse(self.pulse, self.grid)
        ea = apply_phase(e, self.chirp, -1).samples
        ec = apply_phase(e, self.chirp, +1).samples
        det = self.grid.detunings
        e1 = (ea + ec) / np.sqrt(2.0)
        eps = self.epsilon
        if eps != 0.0:
            e1 = e1 * np.exp(1j * eps * det**2)
        e1_time = Field(self.grid, Domain.TIME, frequency_to_time(e1, self.grid))
        e2 = Field(self.grid, Domain.FREQUENCY, (ea - ec) / np.sqrt(2.0))
        return e1_time, e2


def chirped_extent(chirp, pulse):
    """Rough temporal FWHM of a chirped pulse from its group delay.

    Twice the group delay at the spectral half-maximum plus the
    transform-limited width; used only for grid-margin checks.
    """
    half = 2.0 * np.sqrt(LN2) / pulse.fwhm_t  # detuning of spectral half max
    return 2.0 * abs(float(chirp.group_delay(half))) + pulse.fwhm_t


@dataclass(frozen=True, eq=False)
class DelayScan:
    delays: np.ndarray  # fs
    intensity: np.ndarray  # band-integrated, a.u.
    filter_center: float  # nm
    filter_width: float  # nm
    epsilon: float  # fs^2
    chirp: object = None  # ChirpKind or None

    def __post_init__(self):
        d = np.asarray(self.delays, dtype=float)
        y = np.asarray(self.intensity, dtype=float)
        if d.shape != y.shape or d.ndim != 1:
            raise InvalidArgument("delays and intensity must be 1-D and equal length")
        if np.any(y < 0):
            raise InvalidArgument("scan intensity must be non-negative")
        object.__setattr__(self, "delays", d)
        object.__setattr__(self, "intensity", y)

    def scaled(self, factor):
        return DelayScan(self.delays, self.intensity * factor, self.filter_center,
                         self.filter_width, self.epsilon, self.chirp)


@dataclass(frozen=True, eq=False)
class Spectrogram:
    delays: np.ndarray  # fs
    detunings: np.ndarray  # fs^-1 about 2 omega_0
    wavelengths: np.ndarray  # nm
    intensities: np.ndarray  # shape (len(delays), len(detunings))
    metadata: dict = field(default_factory=dict)


def filter_band(grid, center_nm=DEFAULT_FILTER_CENTER, width_nm=DEFAULT_FILTER_WIDTH,
                carrier_multiple=2):
    """Boolean mask of detuning bins inside a wavelength window.

    Edges are ``2 pi c / (center +- width/2)``; a bin counts if its centre
    detuning lies within the (closed) interval.
    """
    if not width_nm > 0 or not center_nm > width_nm / 2:
        raise InvalidArgument("filter needs width > 0 and centre > width/2")
    carrier = carrier_multiple * grid.omega_ref
    lo = float(wavelength_to_omega(center_nm + width_nm / 2)) - carrier
    hi = float(wavelength_to_omega(center_nm - width_nm / 2)) - carrier
    det = grid.detunings
    if lo < det[0] or hi > det[-1]:
        raise InvalidArgument("filter band extends beyond the representable detuning range")
    mask = (det >= lo) & (det <= hi)
    if not mask.any():
        raise InvalidArgument("filter band contains no grid bins")
    return mask


def _check_tau(grid, tau):
    if not np.isfinite(tau) or abs(tau) > grid.time_span / 4:
        raise InvalidArgument(f"delay {tau!r} fs too large for the grid window")


def sfg_field(arm1, arm2, tau):
    """SFG spectrum from a time-domain arm-1 field and a frequency-domain arm-2 field.

    Arm 2 is delayed by ``tau`` before the fields are multiplied in time.
    """
    if arm1.domain is not Domain.TIME or arm2.domain is not Domain.FREQUENCY:
        raise InvalidArgument("sfg_field expects arm1 in time and arm2 in frequency")
    grid = arm1.grid
    _check_tau(grid, tau)
    e2_time = frequency_to_time(arm2.samples * linear_phase(grid, tau), grid)
    product = arm1.samples * e2_time
    return Field(grid, Domain.FREQUENCY, time_to_frequency(product, grid),
                 arm1.carrier_multiple + arm2.carrier_multiple)


def cpi_sfg_spectrum(setup, tau):
    """Complex SFG field (carrier 2 omega_0) at delay ``tau``."""
    e1, e2 = setup.arms
    return sfg_field(e1, e2, tau)


def cpi_delay_scan(setup, delays=None, filter_center=DEFAULT_FILTER_CENTER,
                   filter_width=DEFAULT_FILTER_WIDTH, threads=None):
    """Band-integrated SFG intensity versus delay (plain sum over the filter bins)."""
    scan, _ = cpi_scan_with_spectrogram(setup, delays, filter_center, filter_width,
                                        window_nm=False, threads=threads)
    return scan


def cpi_spectrogram(setup, delays=None, window_nm=(399.0, 401.0), bin_stride=1,
                    threads=None):
    """SFG spectral intensity versus delay inside a wavelength window.

    ``window_nm=None`` keeps every bin of the SFG grid.
    """
    _, spec = cpi_scan_with_spectrogram(setup, delays, window_nm=window_nm,
                                        bin_stride=bin_stride, threads=threads)
    return spec


def cpi_scan_with_spectrogram(setup, delays=None, filter_center=DEFAULT_FILTER_CENTER,
                              filter_width=DEFAULT_FILTER_WIDTH, window_nm=(399.0, 401.0),
                              bin_stride=1, threads=None):
    """Dip trace and spectrogram from a single pass over the delays.

    Pass ``window_nm=False`` to skip the spectrogram (returned as ``None``).
    """
    delays = default_delays() if delays is None else np.asarray(delays, dtype=float)
    grid = setup.grid
    band = filter_band(grid, filter_center, filter_width)
    if window_nm is False:
        idx = None
    elif window_nm is None:
        idx = np.arange(grid.n_points)[:: max(1, int(bin_stride))]
    else:
        lo_nm, hi_nm = sorted(window_nm)
        win = filter_band(grid, 0.5 * (lo_nm + hi_nm), hi_nm - lo_nm)
        idx = np.flatnonzero(win)[:: max(1, int(bin_stride))]
    e1, e2 = setup.arms

    def one(tau):
        s = sfg_field(e1, e2, float(tau)).samples
        b = s[band]
        total = float(np.sum(b.real**2 + b.imag**2))
        return total, (None if idx is None else np.abs(s[idx]) ** 2)

    results = _parallel_map(one, list(delays), threads)
    scan = DelayScan(delays, np.array([r[0] for r in results]), float(filter_center),
                     float(filter_width), float(setup.epsilon), setup.chirp.kind)
    if idx is None:
        return scan, None
    det = grid.detunings[idx]
    with np.errstate(divide="ignore"):
        wl = omega_to_wavelength(2 * grid.omega_ref + det)
    meta = {
        "chirp": setup.chirp.kind.value,
        "epsilon_fs2": setup.epsilon,
        "fwhm_fs": setup.pulse.fwhm_t,
        "center_nm": setup.pulse.center_wavelength,
    }
    spec = Spectrogram(delays, det, wl, np.array([r[1] for r in results]), meta)
    return scan, spec


# --- white-light interferometer ------------------------------------------------


def _wli_weights(pulse, grid):
    return gaussian_tl_pulse(pulse, grid).intensity


def wli_fringe_and_envelope(pulse, grid, tau, epsilon):
    """Fringe-resolved WLI signal and its envelope at a single delay.

    ``fringe = sum I(w) [1 + cos(w tau - eps (w - w0)^2)] dw`` with the full
    optical frequency; ``envelope = |sum I(w) exp(i(w tau - eps (w-w0)^2)) dw|``.
    """
    weights = _wli_weights(pulse, grid)
    keep = weights > weights.max() * 1e-30
    det = grid.detunings[keep]
    w = weights[keep]
    omega = grid.omega_ref + det
    phase = omega * tau - epsilon * det**2
    dw = grid.d_omega
    fringe = float(np.sum(w * (1.0 + np.cos(phase))) * dw)
    envelope = float(np.abs(np.sum(w * np.exp(1j * (det * tau - epsilon * det**2)))) * dw)
    return fringe, envelope


def _wli_analytic_signal(pulse, grid, epsilon):
    """``sum I exp(i(det tau - eps det^2)) dw`` for every delay on the time axis."""
    g = _wli_weights(pulse, grid) * np.exp(-1j * epsilon * grid.detunings**2)
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(g))) * grid.n_points * grid.d_omega


def wli_envelope_trace(pulse, grid, epsilon):
    """WLI envelope on the grid's delay axis, computed with one transform."""
    return grid.times, np.abs(_wli_analytic_signal(pulse, grid, epsilon))


def wli_signal_trace(pulse, grid, epsilon):
    """Delays, fringe-resolved signal and envelope on the grid's delay axis."""
    z = _wli_analytic_signal(pulse, grid, epsilon)
    tau = grid.times
    dc = float(np.sum(_wli_weights(pulse, grid)) * grid.d_omega)
    fringe = dc + np.real(np.exp(1j * grid.omega_ref * tau) * z)
    return tau, fringe, np.abs(z)


def wli_envelope_width(pulse, grid, epsilon):
    """Numeric FWHM of the WLI envelope, fs."""
    delays, env = wli_envelope_trace(pulse, grid, epsilon)
    return intensity_fwhm(env, delays)


def wli_envelope_width_analytic(pulse, epsilon):
    """Closed-form WLI envelope FWHM, ``2 s sqrt(1 + (4 ln2 eps / s^2)^2)``."""
    s = pulse.fwhm_t if isinstance(pulse, PulseSpec) else float(pulse)
    if not s > 0:
        raise InvalidArgument("pulse width must be positive")
    return float(2.0 * s * np.sqrt(1.0 + (4.0 * LN2 * epsilon / s**2) ** 2))


__all__ = [
    "ChirpKind",
    "CpiSetup",
    "DelayScan",
    "Spectrogram",
    "chirped_extent",
    "cpi_delay_scan",
    "cpi_sfg_spectrum",
    "cpi_scan_with_spectrogram",
    "cpi_spectrogram",
    "default_delays",
    "filter_band",
    "sfg_field",
    "wli_envelope_trace",
    "wli_envelope_width",
    "wli_envelope_width_analytic",
    "wli_signal_trace",
    "wli_fringe_and_envelope",
]

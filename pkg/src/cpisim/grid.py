"""Sampling lattice and the forward/inverse spectral transforms.

Fields are complex envelopes about ``carrier_multiple * omega_ref``; the
physical angular frequency of frequency sample ``k`` is
``carrier_multiple * omega_ref + detuning[k]``.

Conventions used everywhere in the package:

* Both axes are stored centred and increasing: ``t[k] = (k - N/2) dt`` and
  ``detuning[k] = (k - N/2) d_omega``.
* Time -> frequency uses the kernel ``exp(+i detuning t)``, so multiplying a
  spectrum by ``exp(i detuning tau)`` delays the envelope by ``+tau``.
* Transforms are unitary with respect to the step-weighted inner products,
  i.e. ``sum |E(t)|^2 dt == sum |E(w)|^2 d_omega``. This is the orthonormal
  DFT scaled by ``sqrt(dt / d_omega)`` and approximates the symmetric
  continuous Fourier transform ``(2 pi)^-1/2 \\int E(t) exp(i w t) dt``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.fft as sfft

from .errors import InvalidArgument

__all__ = [
    "Domain",
    "SampleGrid",
    "Field",
    "make_grid",
    "to_frequency",
    "to_time",
    "set_fft_workers",
    "linear_phase",
]

_FFT_WORKERS = 1


def set_fft_workers(n):
    """Number of threads scipy.fft may use per transform."""
    global _FFT_WORKERS
    _FFT_WORKERS = max(1, int(n))


class Domain(Enum):
    TIME = "time"
    FREQUENCY = "frequency"


@dataclass(frozen=True)
class SampleGrid:
    """Uniform time/frequency lattice.

    Only ``n_points``, ``time_span`` and ``omega_ref`` are stored; the steps
    are derived so they can never drift out of consistency.
    """

    n_points: int
    time_span: float  # fs
    omega_ref: float  # fs^-1

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < 2 or (n & (n - 1)) != 0:
            raise InvalidArgument(f"n_points must be a power of two >= 2, got {n!r}")
        if not np.isfinite(self.time_span) or self.time_span <= 0:
            raise InvalidArgument(f"time_span must be positive, got {self.time_span!r}")
        if not np.isfinite(self.omega_ref) or self.omega_ref <= 0:
            raise InvalidArgument(f"omega_ref must be positive, got {self.omega_ref!r}")

    @property
    def dt(self):
        return self.time_span / self.n_points

    @property
    def d_omega(self):
        return 2.0 * np.pi / self.time_span

    @property
    def times(self):
        return (np.arange(self.n_points) - self.n_points // 2) * self.dt

    @property
    def detunings(self):
        return (np.arange(self.n_points) - self.n_points // 2) * self.d_omega

    def omegas(self, carrier_multiple=1):
        """Absolute angular frequencies for a field with the given carrier."""
        return carrier_multiple * self.omega_ref + self.detunings

    def step(self, domain):
        return self.dt if domain is Domain.TIME else self.d_omega


def make_grid(n_points, time_span, omega_ref):
    """Build a :class:`SampleGrid`; raises :class:`InvalidArgument` on bad input."""
    return SampleGrid(n_points, float(time_span), float(omega_ref))


@dataclass(frozen=True, eq=False)
class Field:
    """Complex envelope sampled on ``grid`` in one of the two domains."""

    grid: SampleGrid
    domain: Domain
    samples: np.ndarray
    carrier_multiple: int = 1

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.shape != (self.grid.n_points,):
            raise InvalidArgument(
                f"samples must have shape ({self.grid.n_points},), got {s.shape}"
            )
        if self.carrier_multiple < 1:
            raise InvalidArgument("carrier_multiple must be a positive integer")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def axis(self):
        return self.grid.times if self.domain is Domain.TIME else self.grid.detunings

    @property
    def intensity(self):
        return np.abs(self.samples) ** 2

    def energy(self):
        return float(np.sum(self.intensity) * self.grid.step(self.domain))

    def replace(self, samples):
        """Same grid/domain/carrier, new samples."""
        return Field(self.grid, self.domain, samples, self.carrier_multiple)


def linear_phase(grid, tau):
    """``exp(i * detuning * tau)`` on the centred detuning axis.

    Built as an outer product of two short tables, which is much cheaper than
    a full-length complex exponential and accurate to a few ulp.
    """
    n = grid.n_points
    block = 1 << max(0, (n.bit_length() - 1) // 2)
    rate = grid.d_omega * tau
    coarse = np.exp(1j * rate * (np.arange(n // block) * block - n // 2))
    fine = np.exp(1j * rate * np.arange(block))
    return np.outer(coarse, fine).ravel()


def _scale(grid):
    return np.sqrt(grid.dt / grid.d_omega)


def time_to_frequency(samples, grid):
    """Array-level forward transform (centred in, centred out)."""
    spec = sfft.ifft(sfft.ifftshift(samples), norm="ortho", workers=_FFT_WORKERS)
    return sfft.fftshift(spec) * _scale(grid)


def frequency_to_time(samples, grid):
    """Array-level inverse of :func:`time_to_frequency`."""
    sig = sfft.fft(sfft.ifftshift(samples), norm="ortho", workers=_FFT_WORKERS)
    return sfft.fftshift(sig) / _scale(grid)


def to_frequency(field):
    if field.domain is not Domain.TIME:
        raise InvalidArgument("to_frequency expects a time-domain field")
    return Field(field.grid, Domain.FREQUENCY,
                 time_to_frequency(field.samples, field.grid), field.carrier_multiple)


def to_time(field):
    if field.domain is not Domain.FREQUENCY:
        raise InvalidArgument("to_time expects a frequency-domain field")
    return Field(field.grid, Domain.TIME,
                 frequency_to_time(field.samples, field.grid), field.carrier_multiple)

"""Unit helpers. Lengths in nm, times in fs, angular frequencies in fs^-1."""

import numpy as np
from scipy.constants import c as _C_SI

SPEED_OF_LIGHT = _C_SI * 1e9 / 1e15  # nm/fs


def wavelength_to_omega(wavelength_nm):
    return 2.0 * np.pi * SPEED_OF_LIGHT / np.asarray(wavelength_nm, dtype=float)


def omega_to_wavelength(omega):
    return 2.0 * np.pi * SPEED_OF_LIGHT / np.asarray(omega, dtype=float)

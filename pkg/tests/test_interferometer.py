import numpy as np
import pytest
from scipy.signal import find_peaks

from cpisim.dispersion import BK7, DispersionSpec, epsilon_for_thickness
from cpisim.errors import InvalidArgument
from cpisim.grid import Field, make_grid
from cpisim.interferometer import (
    CpiSetup,
    DelayScan,
    cpi_delay_scan,
    cpi_scan_with_spectrogram,
    cpi_sfg_spectrum,
    cpi_spectrogram,
    default_delays,
    filter_band,
    sfg_field,
    wli_envelope_trace,
    wli_envelope_width,
    wli_envelope_width_analytic,
    wli_fringe_and_envelope,
    wli_signal_trace,
)
from cpisim.pulse import REFERENCE_CHIRPS, ChirpKind, PhaseProfile, PulseSpec, gaussian_tl_pulse
from cpisim.units import omega_to_wavelength, wavelength_to_omega

KINDS = list(ChirpKind)


@pytest.fixture(scope="module")
def zero_eps_scans(reference_setups):
    return {k: cpi_delay_scan(s, default_delays()) for k, s in reference_setups.items()}


# -- setup and delay axis ------------------------------------------------------

def test_default_delays():
    d = default_delays()
    assert d.size == 101 and d[0] == -25.0 and d[-1] == 25.0
    assert np.allclose(np.diff(d), 0.5)
    with pytest.raises(InvalidArgument):
        default_delays(1.0, -1.0)


def test_setup_needs_twice_the_chirped_extent(pulse10):
    grid = make_grid(2**16, 150_000.0, float(wavelength_to_omega(800.0)))
    with pytest.raises(InvalidArgument):
        CpiSetup(REFERENCE_CHIRPS[ChirpKind.LINEAR], pulse10, grid)


def test_setup_rejects_narrow_super_erf(ref_grid, pulse10):
    with pytest.raises(InvalidArgument):
        CpiSetup(PhaseProfile.super_erf(7450, 9.0), pulse10, ref_grid)


def test_delay_scan_validation():
    with pytest.raises(InvalidArgument):
        DelayScan(np.arange(3.0), np.array([1.0, -1.0, 1.0]), 400.0, 1.0, 0.0)
    with pytest.raises(InvalidArgument):
        DelayScan(np.arange(3.0), np.ones(4), 400.0, 1.0, 0.0)


# -- filter band ---------------------------------------------------------------

def test_filter_band_edges(ref_grid):
    mask = filter_band(ref_grid)
    det = ref_grid.detunings[mask]
    wl = omega_to_wavelength(2 * ref_grid.omega_ref + det)
    assert wl.min() >= 399.5 and wl.max() <= 400.5
    assert mask.sum() == 750
    lo = float(wavelength_to_omega(400.5)) - 2 * ref_grid.omega_ref
    assert det[0] - lo < ref_grid.d_omega


@pytest.mark.parametrize("center,width", [(400.0, 0.0), (400.0, -1.0), (0.4, 1.0), (200.0, 1.0)])
def test_filter_band_errors(ref_grid, center, width):
    with pytest.raises(InvalidArgument):
        filter_band(ref_grid, center, width)


def test_filter_band_empty(ref_grid):
    with pytest.raises(InvalidArgument):
        filter_band(ref_grid, 400.0003, 1e-6)  # bins are ~1.3e-3 nm apart


# -- SFG spectrum --------------------------------------------------------------

def test_doublet_at_20fs(reference_setups, ref_grid):
    f = cpi_sfg_spectrum(reference_setups[ChirpKind.LINEAR], 20.0)
    assert f.carrier_multiple == 2
    det = ref_grid.detunings
    win = filter_band(ref_grid, 400.0, 2.0)
    y = f.intensity[win]
    peaks, _ = find_peaks(y)
    top = peaks[np.argsort(y[peaks])[::-1]]
    assert y[top[2]] < 0.01 * y[top[1]]
    d1, d2 = det[win][top[:2]]
    assert d1 == pytest.approx(-d2, abs=1e-15)
    wl = omega_to_wavelength(2 * ref_grid.omega_ref + np.array([d1, d2]))
    assert 0.5 * wl.sum() == pytest.approx(400.0, abs=1e-3)


@pytest.mark.parametrize("kind", KINDS)
def test_zero_delay_cancels_zero_detuning(kind, reference_setups, ref_grid):
    setup = reference_setups[kind]
    k0 = np.flatnonzero(ref_grid.detunings == 0.0)[0]
    peak = cpi_sfg_spectrum(setup, 20.0).intensity.max()
    at_zero = cpi_sfg_spectrum(setup, 0.0).intensity[k0]
    print(f"{kind.value}: zero-detuning intensity at tau=0 / doublet peak = {at_zero / peak:.3e}")
    assert at_zero < 1e-4 * peak


@pytest.mark.parametrize("kind", KINDS)
def test_chirp_sign_swap_gives_same_spectrum(kind, reference_setups, pulse10, ref_grid):
    p = REFERENCE_CHIRPS[kind]
    flipped = PhaseProfile(p.kind, a=-p.a, b=-p.b, sigma=p.sigma)
    disp = DispersionSpec(thickness=10.0)
    a = CpiSetup(p, pulse10, ref_grid, disp)
    b = CpiSetup(flipped, pulse10, ref_grid, disp)
    ia, ib = cpi_sfg_spectrum(a, 7.5).intensity, cpi_sfg_spectrum(b, 7.5).intensity
    np.testing.assert_allclose(ib, ia, rtol=1e-9, atol=1e-12 * ia.max())


def test_global_phase_invariance(reference_setups):
    e1, e2 = reference_setups[ChirpKind.ERF].arms
    ref = sfg_field(e1, e2, 3.5).intensity
    for c1, c2 in [(1j, 1.0), (1.0, np.exp(0.7j)), (np.exp(-2.1j), -1.0)]:
        got = sfg_field(e1.replace(e1.samples * c1), e2.replace(e2.samples * c2), 3.5).intensity
        np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-15 * ref.max())


def test_sfg_field_argument_checks(reference_setups, ref_grid):
    e1, e2 = reference_setups[ChirpKind.LINEAR].arms
    with pytest.raises(InvalidArgument):
        sfg_field(e2, e1, 0.0)
    with pytest.raises(InvalidArgument):
        sfg_field(e1, e2, ref_grid.time_span / 3)
    with pytest.raises(InvalidArgument):
        sfg_field(e1, e2, float("nan"))


# -- delay scans ---------------------------------------------------------------

@pytest.mark.parametrize("kind", KINDS)
def test_zero_eps_scan_symmetric(kind, zero_eps_scans):
    y = zero_eps_scans[kind].intensity
    np.testing.assert_allclose(y, y[::-1], rtol=1e-6)


@pytest.mark.parametrize("kind", KINDS)
def test_scan_smoothness(kind, zero_eps_scans):
    y = zero_eps_scans[kind].intensity
    assert np.max(np.abs(np.diff(y))) < 0.25 * (y.max() - y.min())


@pytest.mark.parametrize("kind", KINDS)
def test_scan_has_central_dip(kind, zero_eps_scans):
    s = zero_eps_scans[kind]
    assert s.delays[np.argmin(s.intensity)] == 0.0
    assert s.intensity.min() < 0.05 * s.intensity.max()
    assert s.chirp is kind and s.epsilon == 0.0
    assert (s.filter_center, s.filter_width) == (400.0, 1.0)


def test_threaded_scan_is_bit_identical(reference_setups):
    setup = reference_setups[ChirpKind.SUPER_ERF]
    delays = [-3.0, 0.5, 4.0, 12.0]
    serial = cpi_delay_scan(setup, delays)
    threaded = cpi_delay_scan(setup, delays, threads=3)
    np.testing.assert_array_equal(serial.intensity, threaded.intensity)


def test_spectrogram_consistent_with_scan(reference_setups, ref_grid):
    setup = reference_setups[ChirpKind.LINEAR]
    delays = [-10.0, 0.0, 6.5]
    scan, spec = cpi_scan_with_spectrogram(setup, delays, window_nm=(399.5, 400.5))
    assert spec.intensities.shape == (3, spec.detunings.size)
    assert np.all(spec.intensities >= 0)
    np.testing.assert_allclose(spec.intensities.sum(axis=1), scan.intensity, rtol=1e-12)
    assert spec.wavelengths.min() >= 399.5 and spec.wavelengths.max() <= 400.5
    assert spec.metadata["chirp"] == "linear"
    strided = cpi_spectrogram(setup, delays, window_nm=(399.5, 400.5), bin_stride=5)
    np.testing.assert_array_equal(strided.intensities, spec.intensities[:, ::5])


def test_dispersion_enters_arm_one_only(pulse10, ref_grid):
    chirp = REFERENCE_CHIRPS[ChirpKind.LINEAR]
    base = CpiSetup(chirp, pulse10, ref_grid)
    disp = base.with_dispersion(DispersionSpec(thickness=20.0))
    assert disp.epsilon == epsilon_for_thickness(BK7, 800.0, 20.0)
    np.testing.assert_array_equal(disp.arms[1].samples, base.arms[1].samples)
    assert not np.array_equal(disp.arms[0].samples, base.arms[0].samples)


# -- white-light interferometer ------------------------------------------------

def test_wli_fringe_peak_at_zero(ref_grid, pulse10):
    total = gaussian_tl_pulse(pulse10, ref_grid).energy()
    fringe, envelope = wli_fringe_and_envelope(pulse10, ref_grid, 0.0, 0.0)
    assert fringe == pytest.approx(2 * total, rel=1e-12)
    assert envelope == pytest.approx(total, rel=1e-12)
    for tau in (0.3, -1.1, 5.0):
        assert wli_fringe_and_envelope(pulse10, ref_grid, tau, 0.0)[0] < fringe


def test_wli_analytic_values():
    assert wli_envelope_width_analytic(PulseSpec(10.0, 800.0), 0.0) == 20.0
    assert wli_envelope_width_analytic(10.0, 1428.72) == pytest.approx(792.50300, abs=1e-4)
    with pytest.raises(InvalidArgument):
        wli_envelope_width_analytic(0.0, 1.0)


def test_wli_analytic_asymptotically_linear():
    w1 = wli_envelope_width_analytic(10.0, 1e5)
    w2 = wli_envelope_width_analytic(10.0, 2e5)
    assert w2 / w1 == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("thickness", [0.0, 10.0, 30.0, 64.0])
def test_wli_numeric_width_matches_analytic(thickness, ref_grid, pulse10):
    eps = epsilon_for_thickness(BK7, 800.0, thickness)
    numeric = wli_envelope_width(pulse10, ref_grid, eps)
    assert numeric == pytest.approx(wli_envelope_width_analytic(pulse10, eps), rel=1e-3)


def test_wli_width_at_64mm(ref_grid, pulse10):
    eps = epsilon_for_thickness(BK7, 800.0, 64.0)
    assert wli_envelope_width(pulse10, ref_grid, eps) == pytest.approx(792.51, abs=0.5)


@pytest.mark.parametrize("eps", [0.0, 700.0])
def test_wli_trace_matches_pointwise(eps, ref_grid, pulse10):
    tau, fringe, env = wli_signal_trace(pulse10, ref_grid, eps)
    _, env_only = wli_envelope_trace(pulse10, ref_grid, eps)
    np.testing.assert_array_equal(env, env_only)
    mid = ref_grid.n_points // 2
    for k in (mid, mid + 7, mid - 300):
        f_pt, e_pt = wli_fringe_and_envelope(pulse10, ref_grid, tau[k], eps)
        assert e_pt == pytest.approx(env[k], rel=1e-9, abs=1e-12 * env.max())
        assert f_pt == pytest.approx(fringe[k], rel=1e-9, abs=1e-12 * fringe.max())

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpisim import analysis
from cpisim.analysis import (
    DipFit,
    SweepRow,
    baseline_intensity_ratio,
    crossover_thickness,
    dip_model,
    dispersion_sweep,
    fit_gaussian_dip,
    measure_dip,
    resolution_enhancement,
)
from cpisim.errors import FitFailed, InvalidArgument
from cpisim.interferometer import CpiSetup, DelayScan, default_delays
from cpisim.pulse import ChirpKind, PhaseProfile


def synthetic(delays, baseline=1.0, depth=1.0, center=0.0, fwhm=10.0, **kw):
    delays = np.asarray(delays, dtype=float)
    y = dip_model(delays, baseline, depth, center, fwhm)
    return DelayScan(delays, np.clip(y, 0, None), kw.get("fc", 400.0), kw.get("fw", 1.0), 0.0)


def test_exact_inverted_gaussian():
    fit = fit_gaussian_dip(synthetic(default_delays()))
    assert fit.fwhm == pytest.approx(10.0, rel=1e-9)
    assert fit.visibility == pytest.approx(1.0, abs=1e-9)
    assert fit.center == pytest.approx(0.0, abs=1e-9)
    assert fit.rms_residual < 1e-9
    assert 0 <= fit.visibility <= 1 and fit.depth <= fit.baseline


@settings(max_examples=40, deadline=None)
@given(st.floats(5.0, 50.0), st.floats(-5.0, 5.0), st.floats(0.05, 0.98), st.floats(1e-3, 1e3))
def test_synthetic_dips_recovered(fwhm, center, visibility, baseline):
    delays = default_delays(-100.0, 100.0, 0.5)
    scan = synthetic(delays, baseline, visibility * baseline, center, fwhm)
    fit = fit_gaussian_dip(scan)
    assert f"{fit.fwhm:.6g}" == f"{fwhm:.6g}"
    assert fit.center == pytest.approx(center, abs=1e-6)
    assert fit.visibility == pytest.approx(visibility, rel=1e-6)
    assert fit.baseline == pytest.approx(baseline, rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-12, 1e12))
def test_fit_scale_invariant(factor):
    rng = np.random.default_rng(3)
    d = default_delays()
    base = synthetic(d, 1.0, 0.8, 0.7, 12.0)
    noisy = DelayScan(d, base.intensity * (1 + 0.01 * rng.normal(size=d.size)), 400.0, 1.0, 0.0)
    a, b = fit_gaussian_dip(noisy), fit_gaussian_dip(noisy.scaled(factor))
    assert b.fwhm == pytest.approx(a.fwhm, rel=1e-9)
    assert b.visibility == pytest.approx(a.visibility, rel=1e-9)
    assert b.baseline == pytest.approx(a.baseline * factor, rel=1e-9)


def test_overshooting_dip_is_clamped():
    # a flat-bottomed dip that touches zero: the best Gaussian undershoots zero
    d = default_delays()
    y = 1.0 - np.exp(-np.abs(d / 6.0) ** 4)
    fit = fit_gaussian_dip(DelayScan(d, y, 400.0, 1.0, 0.0))
    assert fit.visibility == 1.0 and fit.depth == fit.baseline
    assert fit.rms_residual > 1e-3


def test_fit_needs_enough_points():
    with pytest.raises(InvalidArgument):
        fit_gaussian_dip(synthetic(np.linspace(-10, 10, 14)))


def test_fit_rejects_edge_minimum():
    d = default_delays()
    with pytest.raises(InvalidArgument):
        fit_gaussian_dip(synthetic(d, center=-25.0))


def test_fit_fails_on_zero_scan():
    d = default_delays()
    with pytest.raises(FitFailed):
        fit_gaussian_dip(DelayScan(d, np.zeros(d.size), 400.0, 1.0, 0.0))


def test_fit_fails_without_convergence():
    rng = np.random.default_rng(5)
    d = default_delays()
    y = synthetic(d, 1.0, 0.7, 2.0, 11.0).intensity * (1 + 0.05 * rng.normal(size=d.size))
    with pytest.raises(FitFailed) as info:
        fit_gaussian_dip(DelayScan(d, y, 400.0, 1.0, 0.0), max_iterations=1)
    assert "params" in info.value.diagnostics and "rms_residual" in info.value.diagnostics


def test_fit_fails_on_negative_depth(monkeypatch):
    class Result:
        x = np.array([1.0, -0.2, 0.0, 10.0])
        fun = np.zeros(101)
        jac = np.eye(101, 4)
        nfev, status = 5, 2
    monkeypatch.setattr(analysis, "least_squares", lambda *a, **k: Result())
    with pytest.raises(FitFailed, match="negative"):
        fit_gaussian_dip(synthetic(default_delays()))


def test_fit_handles_unsorted_delays():
    d = default_delays()
    perm = np.random.default_rng(0).permutation(d.size)
    scan = synthetic(d, 2.0, 1.5, 1.0, 9.0)
    shuffled = DelayScan(d[perm], scan.intensity[perm], 400.0, 1.0, 0.0)
    assert fit_gaussian_dip(shuffled).fwhm == pytest.approx(9.0, rel=1e-9)


def test_resolution_enhancement():
    assert resolution_enhancement(14.14, 20.0) == pytest.approx(1.414, rel=1e-3)
    assert resolution_enhancement(10.0, 20.0) == 2.0
    assert resolution_enhancement(8.70, 20.0) == pytest.approx(2.299, rel=1e-3)
    with pytest.raises(InvalidArgument):
        resolution_enhancement(0.0, 20.0)


def test_baseline_ratio():
    d = default_delays()
    a = synthetic(d, 1.5, 1.4, 0.0, 10.0)
    assert baseline_intensity_ratio(a, a) == pytest.approx(1.0, abs=1e-12)
    assert baseline_intensity_ratio(a, synthetic(d, 1.0, 0.9, 0.0, 14.0)) == pytest.approx(1.5, rel=1e-9)


def test_baseline_ratio_mismatch():
    d = default_delays()
    with pytest.raises(InvalidArgument):
        baseline_intensity_ratio(synthetic(d), synthetic(d[1:]))
    with pytest.raises(InvalidArgument):
        baseline_intensity_ratio(synthetic(d), synthetic(d, fc=401.0))


# -- adaptive window and sweep -------------------------------------------------

class FakeScanner:
    """Stands in for the CPI engine: a dip whose width grows with epsilon."""

    def __init__(self):
        self.calls = []

    def width(self, setup):
        return 10.0 + setup.epsilon / 20.0

    def __call__(self, setup, delays, filter_center=400.0, filter_width=1.0, threads=None):
        d = np.asarray(delays, dtype=float)
        self.calls.append(d)
        y = dip_model(d, 1.0, 0.9, 0.0, self.width(setup))
        return DelayScan(d, y, filter_center, filter_width, setup.epsilon, setup.chirp.kind)


@pytest.fixture
def small_setups(small_grid, pulse10):
    chirps = {
        ChirpKind.LINEAR: PhaseProfile.linear(18034.0),
        ChirpKind.ERF: PhaseProfile.erf(830.0, 10.0),
        ChirpKind.SUPER_ERF: PhaseProfile.super_erf(745.0, 11.2),
    }
    return {k: CpiSetup(c, pulse10, small_grid) for k, c in chirps.items()}


def test_measure_dip_widens_window(monkeypatch, small_setups):
    from cpisim.dispersion import DispersionSpec
    fake = FakeScanner()
    monkeypatch.setattr(analysis, "cpi_delay_scan", fake)
    setup = small_setups[ChirpKind.LINEAR].with_dispersion(DispersionSpec(thickness=20.0))
    width = fake.width(setup)
    scan, fit = measure_dip(setup)
    assert fit.fwhm == pytest.approx(width, rel=1e-9)
    assert -scan.delays.min() >= 2 * width and scan.delays.max() >= 2 * width
    assert np.allclose(np.diff(scan.delays), 0.5)
    # the original 101 points are not recomputed
    assert sum(c.size for c in fake.calls) == scan.delays.size


@pytest.mark.parametrize("thickness", [0.0, 5.0])
def test_measure_dip_keeps_narrow_window(monkeypatch, small_setups, thickness):
    from cpisim.dispersion import DispersionSpec
    fake = FakeScanner()
    monkeypatch.setattr(analysis, "cpi_delay_scan", fake)
    setup = small_setups[ChirpKind.ERF].with_dispersion(DispersionSpec(thickness=thickness))
    assert analysis.WIDEN_FACTOR * fake.width(setup) < 25.0
    scan, fit = measure_dip(setup)
    assert scan.delays.size == 101 and len(fake.calls) == 1


def test_dispersion_sweep(monkeypatch, small_setups):
    fake = FakeScanner()
    monkeypatch.setattr(analysis, "cpi_delay_scan", fake)
    rows = dispersion_sweep(small_setups, [0.0, 8.0, 16.0])
    assert [r.thickness for r in rows] == [0.0, 8.0, 16.0]
    assert rows[0].epsilon == 0.0 and rows[0].width_wli == 20.0
    for r in rows:
        assert r.width_linear == pytest.approx(10.0 + r.epsilon / 20.0, rel=1e-9)
        assert r.width(ChirpKind.SUPER_ERF) == r.width_supererf
    widths = [r.width_linear for r in rows]
    assert widths == sorted(widths)


def test_dispersion_sweep_single_thickness(monkeypatch, small_setups):
    monkeypatch.setattr(analysis, "cpi_delay_scan", FakeScanner())
    rows, details = dispersion_sweep(small_setups, [0.0], return_details=True)
    assert len(rows) == 1 and len(details) == 3


@pytest.mark.parametrize("thicknesses", [[-1.0], [8.0, 0.0]])
def test_dispersion_sweep_argument_errors(small_setups, thicknesses):
    with pytest.raises(InvalidArgument):
        dispersion_sweep(small_setups, thicknesses)


def test_dispersion_sweep_needs_all_chirps(small_setups):
    with pytest.raises(InvalidArgument):
        dispersion_sweep({ChirpKind.LINEAR: small_setups[ChirpKind.LINEAR]}, [0.0])


def test_sweep_fit_failure_carries_context(monkeypatch, small_setups):
    def flat(setup, delays, *a, **k):
        d = np.asarray(delays, dtype=float)
        return DelayScan(d, np.zeros(d.size), 400.0, 1.0, setup.epsilon)
    monkeypatch.setattr(analysis, "cpi_delay_scan", flat)
    with pytest.raises(FitFailed) as info:
        dispersion_sweep(small_setups, [0.0])
    assert info.value.diagnostics["chirp"] == "linear"
    assert info.value.diagnostics["thickness_mm"] == 0.0


def test_crossover_thickness():
    rows = [SweepRow(t, 0.0, 14.0 + t / 100, 10.0 + t / 10, 9.0 + t / 10, 20.0)
            for t in (0.0, 16.0, 32.0, 48.0, 64.0)]
    assert crossover_thickness(rows) == 48.0
    assert crossover_thickness(rows, ChirpKind.SUPER_ERF) == 64.0
    assert crossover_thickness(rows[:2]) is None


def test_dipfit_is_frozen():
    fit = DipFit(0.0, 10.0, 1.0, 0.9, 0.9, 0.0)
    with pytest.raises(AttributeError):
        fit.fwhm = 3.0

"""Dip fitting, resolution enhancement, dispersion sweeps and intensity ratios."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .dispersion import DispersionSpec
from .errors import FitFailed, InvalidArgument
from .interferometer import (
    DEFAULT_FILTER_CENTER,
    DEFAULT_FILTER_WIDTH,
    DelayScan,
    cpi_delay_scan,
    default_delays,
    wli_envelope_width_analytic,
)
from .pulse import LN2, ChirpKind

_FOUR_LN2 = 4.0 * LN2
WIDEN_FACTOR = 1.5  # widen the delay window once WIDEN_FACTOR * fwhm exceeds its half-span


@dataclass(frozen=True)
class DipFit:
    center: float  # fs
    fwhm: float  # fs
    baseline: float
    depth: float
    visibility: float
    rms_residual: float
    fwhm_stderr: float = 0.0
    iterations: int = 0


@dataclass(frozen=True)
class SweepRow:
    thickness: float  # mm
    epsilon: float  # fs^2
    width_linear: float
    width_erf: float
    width_supererf: float
    width_wli: float

    def width(self, kind):
        return {
            ChirpKind.LINEAR: self.width_linear,
            ChirpKind.ERF: self.width_erf,
            ChirpKind.SUPER_ERF: self.width_supererf,
        }[kind]


def dip_model(tau, baseline, depth, center, fwhm):
    return baseline - depth * np.exp(-_FOUR_LN2 * (tau - center) ** 2 / fwhm**2)


def _dip_jacobian(p, tau):
    baseline, depth, center, fwhm = p
    u = tau - center
    g = np.exp(-_FOUR_LN2 * u**2 / fwhm**2)
    jac = np.empty((tau.size, 4))
    jac[:, 0] = 1.0
    jac[:, 1] = -g
    jac[:, 2] = -depth * g * 2.0 * _FOUR_LN2 * u / fwhm**2
    jac[:, 3] = -depth * g * 2.0 * _FOUR_LN2 * u**2 / fwhm**3
    return jac


def _half_depth_width(tau, y, base, imin):
    """Width between half-depth crossings around the minimum, or None."""
    level = 0.5 * (base + y[imin])
    i = imin
    while i > 0 and y[i] < level:
        i -= 1
    j = imin
    while j < y.size - 1 and y[j] < level:
        j += 1
    if y[i] < level or y[j] < level or j - i < 2:
        return None
    left = tau[i] + (level - y[i]) * (tau[i + 1] - tau[i]) / (y[i + 1] - y[i])
    right = tau[j - 1] + (level - y[j - 1]) * (tau[j] - tau[j - 1]) / (y[j] - y[j - 1])
    return right - left if right > left else None


def _polish(x, resid, jac, steps=10):
    """Gauss-Newton steps from a converged point while the steps shrink.

    The cost is flat to rounding over ~sqrt(eps) in the parameters, so the
    LM stopping point wanders at that level; iterating J dx = -r pins the
    stationary point near machine precision. Costs cannot judge steps this
    small, so a step is taken only while the step length keeps contracting.
    """
    x = np.array(x, dtype=float)
    prev = np.inf
    for _ in range(steps):
        dx = np.linalg.lstsq(jac(x), -resid(x), rcond=None)[0]
        size = float(np.max(np.abs(dx) / np.maximum(np.abs(x), 1e-12)))
        if not size < prev or size > 1e-6:
            break
        x = x + dx
        prev = size
        if size <= 1e-14:
            break
    return x


def fit_gaussian_dip(scan, max_iterations=200, xtol=1e-9):
    """Least-squares fit of ``baseline - depth * exp(-4 ln2 (tau - c)^2 / fwhm^2)``.

    Levenberg-Marquardt on the max-normalised trace, so the fitted width and
    visibility do not depend on the overall intensity scale.
    """
    tau = np.asarray(scan.delays, dtype=float)
    raw = np.asarray(scan.intensity, dtype=float)
    if tau.size < 15:
        raise InvalidArgument(f"dip fit needs at least 15 points, got {tau.size}")
    scale = raw.max()
    if not scale > 0:
        raise FitFailed("scan intensity is identically zero")
    order = np.argsort(tau)
    tau, y = tau[order], raw[order] / scale
    imin = int(np.argmin(y))
    if imin == 0 or imin == y.size - 1:
        raise InvalidArgument("dip minimum lies on the edge of the delay range")

    n_edge = max(1, int(round(0.1 * y.size)))
    base0 = float(np.mean(np.concatenate([y[:n_edge], y[-n_edge:]])))
    depth0 = base0 - y[imin]
    width0 = _half_depth_width(tau, y, base0, imin) or 0.25 * (tau[-1] - tau[0])
    p0 = np.array([base0, depth0, tau[imin], width0])

    def resid(p):
        return dip_model(tau, *p) - y

    try:
        res = least_squares(resid, p0, jac=lambda p: _dip_jacobian(p, tau), method="lm",
                            xtol=xtol, ftol=1e-15, gtol=1e-15,
                            max_nfev=max_iterations * (p0.size + 1))
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise FitFailed(f"least-squares solver error: {exc}", initial=p0.tolist()) from None
    def diagnostics(p):
        rms = math.sqrt(float(np.mean(resid(p) ** 2))) * float(scale)
        return dict(params=p.tolist(), rms_residual=rms, nfev=res.nfev, status=res.status)

    if res.status <= 0:
        raise FitFailed("dip fit did not converge", **diagnostics(res.x))
    if res.x[1] < 0:
        raise FitFailed("fitted dip depth is negative", **diagnostics(res.x))
    params = _polish(res.x, resid, lambda p: _dip_jacobian(p, tau))
    baseline, depth, center, fwhm = params
    fwhm = abs(fwhm)
    fun = resid(params)
    diag = diagnostics(params)
    rms = diag["rms_residual"]
    if depth < 0:
        raise FitFailed("fitted dip depth is negative", **diag)
    if baseline <= 0:
        raise FitFailed("fitted baseline is not positive", **diag)
    # a Gaussian fitted to a distorted, near-complete dip can dip below zero;
    # clamp so that depth <= baseline (rms_residual still shows the misfit)
    depth = min(depth, baseline)
    visibility = depth / baseline

    dof = max(1, tau.size - 4)
    s2 = float(np.sum(fun**2)) / dof
    jac = _dip_jacobian(params, tau)
    try:
        cov = np.linalg.inv(jac.T @ jac) * s2
        fwhm_err = math.sqrt(max(0.0, cov[3, 3]))
    except np.linalg.LinAlgError:
        fwhm_err = float("nan")
    return DipFit(
        center=float(center),
        fwhm=float(fwhm),
        baseline=float(baseline * scale),
        depth=float(depth * scale),
        visibility=float(visibility),
        rms_residual=rms,
        fwhm_stderr=fwhm_err,
        iterations=int(res.nfev),
    )


def resolution_enhancement(cpi_fwhm, wli_fwhm):
    """How many times narrower the CPI dip is than the WLI envelope."""
    if not cpi_fwhm > 0 or not wli_fwhm > 0:
        raise InvalidArgument("widths must be positive")
    return wli_fwhm / cpi_fwhm


def baseline_intensity_ratio(scan_a, scan_b):
    """Ratio of fitted dip baselines, a / b."""
    if (scan_a.delays.shape != scan_b.delays.shape
            or not np.array_equal(scan_a.delays, scan_b.delays)):
        raise InvalidArgument("scans must share the same delay axis")
    if (scan_a.filter_center, scan_a.filter_width) != (scan_b.filter_center, scan_b.filter_width):
        raise InvalidArgument("scans must share the same filter band")
    fa, fb = fit_gaussian_dip(scan_a), fit_gaussian_dip(scan_b)
    if fa.baseline == 0 or fb.baseline == 0:
        raise InvalidArgument("zero baseline")
    return fa.baseline / fb.baseline


def measure_dip(setup, delays=None, filter_center=DEFAULT_FILTER_CENTER,
                filter_width=DEFAULT_FILTER_WIDTH, threads=None, widen=True,
                max_widenings=3):
    """Scan and fit, widening the delay window for broad dips.

    Whenever 1.5 fitted FWHM reach past the window edge (the dip there is
    still above 0.2% of its depth), the window grows to +-4 FWHM at the same
    step and the fit is repeated. Already computed delays are reused.
    Returns ``(scan, fit)``.
    """
    delays = default_delays() if delays is None else np.asarray(delays, dtype=float)
    scan = cpi_delay_scan(setup, delays, filter_center, filter_width, threads)
    fit = fit_gaussian_dip(scan)
    if not widen or delays.size < 2:
        return scan, fit
    step = float(np.min(np.diff(np.sort(delays))))
    for _ in range(max_widenings):
        half_span = min(-scan.delays.min(), scan.delays.max())
        if WIDEN_FACTOR * fit.fwhm <= half_span:
            break
        reach = math.ceil(4.0 * fit.fwhm / step) * step
        wide = default_delays(-reach, reach, step)
        known = dict(zip(np.round(scan.delays, 9), scan.intensity))
        missing = [t for t in wide if round(t, 9) not in known]
        if missing:
            extra = cpi_delay_scan(setup, missing, filter_center, filter_width, threads)
            known.update(zip(np.round(extra.delays, 9), extra.intensity))
        merged = np.array(sorted(known))
        scan = DelayScan(merged, np.array([known[t] for t in merged]), scan.filter_center,
                         scan.filter_width, scan.epsilon, scan.chirp)
        fit = fit_gaussian_dip(scan)
    return scan, fit


def dispersion_sweep(setups, thicknesses, delays=None, filter_center=DEFAULT_FILTER_CENTER,
                     filter_width=DEFAULT_FILTER_WIDTH, threads=None, return_details=False):
    """Fitted dip widths for each chirp at each slab thickness.

    ``setups`` maps :class:`ChirpKind` to a template :class:`CpiSetup`; its
    dispersion material is reused with each thickness. The WLI column comes
    from the closed-form envelope width.
    """
    thicknesses = [float(t) for t in thicknesses]
    if any(t < 0 for t in thicknesses):
        raise InvalidArgument("thicknesses must be non-negative")
    if thicknesses != sorted(thicknesses):
        raise InvalidArgument("thicknesses must be sorted")
    missing = set(ChirpKind) - set(setups)
    if missing:
        raise InvalidArgument(f"sweep needs setups for {sorted(k.value for k in missing)}")

    rows, details = [], {}
    for thickness in thicknesses:
        widths = {}
        eps = None
        for kind in ChirpKind:
            template = setups[kind]
            disp = DispersionSpec(template.dispersion.material, thickness,
                                  template.dispersion.wavelength)
            setup = template.with_dispersion(disp)
            eps = setup.epsilon
            try:
                scan, fit = measure_dip(setup, delays, filter_center, filter_width, threads)
            except FitFailed as exc:
                exc.diagnostics.update(chirp=kind.value, thickness_mm=thickness)
                raise
            widths[kind] = fit.fwhm
            details[(kind, thickness)] = (scan, fit)
        pulse = setups[ChirpKind.LINEAR].pulse
        rows.append(SweepRow(thickness, eps, widths[ChirpKind.LINEAR], widths[ChirpKind.ERF],
                             widths[ChirpKind.SUPER_ERF], wli_envelope_width_analytic(pulse, eps)))
    return (rows, details) if return_details else rows


def crossover_thickness(rows, kind=ChirpKind.ERF, reference=ChirpKind.LINEAR):
    """Smallest thickness where ``kind`` is wider than ``reference``, or None."""
    for row in rows:
        if row.width(kind) > row.width(reference):
            return row.thickness
    return None

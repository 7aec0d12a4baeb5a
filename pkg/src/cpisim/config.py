"""Run configuration: an INI-style file with fixed sections and keys.

Example (these are the built-in defaults)::

    [grid]
    n_points = 524288
    time_span_fs = 400000

    [pulse]
    fwhm_fs = 10
    wavelength_nm = 800

    [chirp]
    kind = linear

    [linear]
    a_fs2 = 180337

    [erf]
    b = 8300
    sigma_fs = 10

    [super-erf]
    b = 7450
    sigma_fs = 11.2

    [dispersion]
    material = BK7
    gvd_wavelength_nm = 800
    thickness_mm = 0
    sweep_thickness_mm = 0, 8, 16, 24, 32, 40, 48, 56, 64

    [scan]
    tau_min_fs = -25
    tau_max_fs = 25
    tau_step_fs = 0.5

    [filter]
    center_nm = 400
    width_nm = 1

    [spectrogram]
    window_nm = 399, 401
    bin_stride = 4

    [output]
    directory = results
    precision = 6
    decimate = 1

``material`` is either a built-in name or a path to a material file (see
:func:`cpisim.dispersion.parse_material`). ``window_nm = full`` dumps the
whole SFG grid. Missing keys take their defaults; unknown sections or keys
are rejected.
"""

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .dispersion import MATERIALS, DispersionSpec, load_material
from .errors import ConfigError, InvalidArgument
from .grid import make_grid
from .interferometer import CpiSetup, default_delays, filter_band
from .pulse import ChirpKind, PhaseProfile, PulseSpec
from .units import wavelength_to_omega


def _floats(text):
    return tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip())


def _window(text):
    if str(text).strip().lower() == "full":
        return None
    vals = _floats(text)
    if len(vals) != 2:
        raise ValueError("expected 'lo, hi' or 'full'")
    return vals


def _fmt_floats(vals):
    return ", ".join(repr(float(v)) for v in vals)


def _fmt_window(val):
    return "full" if val is None else _fmt_floats(val)


# (section, key, attribute, parser, formatter)
_SCHEMA = [
    ("grid", "n_points", "n_points", int, str),
    ("grid", "time_span_fs", "time_span_fs", float, repr),
    ("pulse", "fwhm_fs", "fwhm_fs", float, repr),
    ("pulse", "wavelength_nm", "wavelength_nm", float, repr),
    ("chirp", "kind", "chirp_kind", lambda s: ChirpKind(s.strip().lower()).value, str),
    ("linear", "a_fs2", "linear_a_fs2", float, repr),
    ("erf", "b", "erf_b", float, repr),
    ("erf", "sigma_fs", "erf_sigma_fs", float, repr),
    ("super-erf", "b", "super_erf_b", float, repr),
    ("super-erf", "sigma_fs", "super_erf_sigma_fs", float, repr),
    ("dispersion", "material", "material", str.strip, str),
    ("dispersion", "gvd_wavelength_nm", "gvd_wavelength_nm", float, repr),
    ("dispersion", "thickness_mm", "thickness_mm", float, repr),
    ("dispersion", "sweep_thickness_mm", "sweep_thickness_mm", _floats, _fmt_floats),
    ("scan", "tau_min_fs", "tau_min_fs", float, repr),
    ("scan", "tau_max_fs", "tau_max_fs", float, repr),
    ("scan", "tau_step_fs", "tau_step_fs", float, repr),
    ("filter", "center_nm", "filter_center_nm", float, repr),
    ("filter", "width_nm", "filter_width_nm", float, repr),
    ("spectrogram", "window_nm", "spectrogram_window_nm", _window, _fmt_window),
    ("spectrogram", "bin_stride", "spectrogram_bin_stride", int, str),
    ("output", "directory", "output_directory", str.strip, str),
    ("output", "precision", "precision", int, str),
    ("output", "decimate", "decimate", int, str),
]


@dataclass(frozen=True)
class RunConfig:
    n_points: int = 2**19
    time_span_fs: float = 400_000.0
    fwhm_fs: float = 10.0
    wavelength_nm: float = 800.0
    chirp_kind: str = "linear"
    linear_a_fs2: float = 180_337.0
    erf_b: float = 8300.0
    erf_sigma_fs: float = 10.0
    super_erf_b: float = 7450.0
    super_erf_sigma_fs: float = 11.2
    material: str = "BK7"
    gvd_wavelength_nm: float = 800.0
    thickness_mm: float = 0.0
    sweep_thickness_mm: tuple = (0.0, 8.0, 16.0, 24.0, 32.0, 40.0, 48.0, 56.0, 64.0)
    tau_min_fs: float = -25.0
    tau_max_fs: float = 25.0
    tau_step_fs: float = 0.5
    filter_center_nm: float = 400.0
    filter_width_nm: float = 1.0
    spectrogram_window_nm: object = (399.0, 401.0)
    spectrogram_bin_stride: int = 4
    output_directory: str = "results"
    precision: int = 6
    decimate: int = 1

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    # -- builders for the library objects ------------------------------------

    def grid(self):
        with _as_config_error("grid"):
            return make_grid(self.n_points, self.time_span_fs,
                             float(wavelength_to_omega(self.wavelength_nm)))

    def pulse(self):
        with _as_config_error("pulse"):
            return PulseSpec(self.fwhm_fs, self.wavelength_nm)

    def chirp(self, kind=None):
        kind = ChirpKind(kind or self.chirp_kind)
        with _as_config_error(kind.value):
            if kind is ChirpKind.LINEAR:
                return PhaseProfile.linear(self.linear_a_fs2)
            if kind is ChirpKind.ERF:
                return PhaseProfile.erf(self.erf_b, self.erf_sigma_fs)
            return PhaseProfile.super_erf(self.super_erf_b, self.super_erf_sigma_fs)

    def material_model(self):
        name = self.material
        if name in MATERIALS:
            return MATERIALS[name]
        path = Path(name)
        if not path.is_file():
            raise ConfigError(f"unknown material {name!r} (not built in, no such file)",
                              "dispersion.material")
        with _as_config_error("dispersion.material"):
            return load_material(path)

    def dispersion(self, thickness=None):
        thickness = self.thickness_mm if thickness is None else thickness
        with _as_config_error("dispersion"):
            return DispersionSpec(self.material_model(), thickness, self.gvd_wavelength_nm)

    def delays(self):
        with _as_config_error("scan"):
            return default_delays(self.tau_min_fs, self.tau_max_fs, self.tau_step_fs)

    def validate(self):
        """Raise :class:`ConfigError` if any value breaks a module precondition."""
        grid = self.grid()
        self.pulse()
        for kind in ChirpKind:
            self.chirp(kind)
        self.dispersion()
        if list(self.sweep_thickness_mm) != sorted(self.sweep_thickness_mm):
            raise ConfigError("must be sorted", "dispersion.sweep_thickness_mm")
        if any(t < 0 for t in self.sweep_thickness_mm):
            raise ConfigError("must be non-negative", "dispersion.sweep_thickness_mm")
        self.delays()
        for kind in ChirpKind:
            with _as_config_error(kind.value):
                CpiSetup(self.chirp(kind), self.pulse(), grid, self.dispersion())
        with _as_config_error("filter"):
            filter_band(grid, self.filter_center_nm, self.filter_width_nm)
        if self.precision < 1:
            raise ConfigError("must be >= 1", "output.precision")
        if self.decimate < 1:
            raise ConfigError("must be >= 1", "output.decimate")
        if self.spectrogram_bin_stride < 1:
            raise ConfigError("must be >= 1", "spectrogram.bin_stride")
        return self


class _as_config_error:
    def __init__(self, key):
        self.key = key

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None and issubclass(exc_type, (InvalidArgument, ValueError)) \
                and not issubclass(exc_type, ConfigError):
            raise ConfigError(str(exc), self.key) from exc
        return False


DEFAULT_CONFIG = RunConfig()


def parse_config(text, base=DEFAULT_CONFIG):
    """Parse INI text on top of ``base``; unknown sections/keys raise ConfigError."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str.lower
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    schema = {(sec, key): (attr, parse) for sec, key, attr, parse, _ in _SCHEMA}
    sections = {sec for sec, *_ in _SCHEMA}
    changes = {}
    for sec in parser.sections():
        if sec not in sections:
            raise ConfigError("unknown section", sec)
        for key, raw in parser.items(sec):
            entry = schema.get((sec, key))
            if entry is None:
                raise ConfigError("unknown key", f"{sec}.{key}")
            attr, parse = entry
            try:
                changes[attr] = parse(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value {raw!r} ({exc})", f"{sec}.{key}") from None
    return base.replace(**changes)


def load_config(path, base=DEFAULT_CONFIG):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}", str(path)) from None
    return parse_config(text, base)


def format_config(config):
    """Serialise every key; ``parse_config(format_config(c)) == c``."""
    lines = []
    current = None
    for sec, key, attr, _, fmt in _SCHEMA:
        if sec != current:
            if current is not None:
                lines.append("")
            lines.append(f"[{sec}]")
            current = sec
        lines.append(f"{key} = {fmt(getattr(config, attr))}")
    return "\n".join(lines) + "\n"

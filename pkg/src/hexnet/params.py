"""Scenario parameters: validation, unit conversion, and config I/O.

All internal values are strictly SI / linear (watts, hertz, meters, radians,
linear gains).  The text config format accepts dBm / dB / degree variants via
key suffixes ``_dbm``, ``_db`` and ``_deg``; conversion happens once at load.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .errors import ConfigError, MissingKey, NonIntegerThzCount, OutOfRange

C_LIGHT = 3.0e8  # speed of light, m/s

#: tolerance for the delta_T * N_A integrality rule
THZ_COUNT_TOL = 1e-9

#: Nakagami shapes above this are rejected: the coverage sums have m terms and
#: the derivative-order budget of the jet engine is fixed at load time.
MAX_NAKAGAMI_M = 10


def from_db(x: float) -> float:
    """dB -> linear power ratio."""
    return 10.0 ** (x / 10.0)


def to_db(x: float) -> float:
    """Linear power ratio -> dB."""
    return 10.0 * math.log10(x)


def dbm_to_watt(x: float) -> float:
    return 10.0 ** ((x - 30.0) / 10.0)


def watt_to_dbm(x: float) -> float:
    return 10.0 * math.log10(x) + 30.0


@dataclass(frozen=True)
class GeometryParams:
    r_d: float      # disk radius, m
    h_A: float      # AP ceiling height, m
    h_U: float      # UE height, m
    v_0: float      # UE horizontal offset from disk center, m
    N_A: int        # total AP count
    delta_T: float  # fraction of THz APs, in [0, 1]

    @property
    def n_thz(self) -> int:
        """Authoritative THz AP count (delta_T * N_A, validated integral)."""
        return int(round(self.delta_T * self.N_A))

    @property
    def n_rf(self) -> int:
        return self.N_A - self.n_thz

    @property
    def delta_h(self) -> float:
        return self.h_A - self.h_U


@dataclass(frozen=True)
class RadioParams:
    P_T: float       # THz transmit power, W
    P_R: float       # RF transmit power, W
    f_T: float       # THz carrier frequency, Hz
    f_R: float       # RF carrier frequency, Hz
    W_T: float       # THz bandwidth, Hz
    W_R: float       # RF bandwidth, Hz
    k_a: float       # molecular absorption coefficient at f_T, 1/m
    alpha_R: float   # RF path-loss exponent
    alpha_L: float   # THz LOS path-loss exponent
    alpha_N: float   # THz NLOS path-loss exponent
    m_L: int         # Nakagami shape, THz LOS
    m_N: int         # Nakagami shape, THz NLOS
    sigma2_T: float  # THz noise power, W
    sigma2_R: float  # RF noise power, W
    B_T: float       # THz association bias, linear, >= 0
    theta: float     # SINR threshold, linear

    @property
    def gamma_T(self) -> float:
        """Free-space reference gain c^2 / (4 pi f_T)^2, recomputed on demand."""
        return C_LIGHT**2 / (4.0 * math.pi * self.f_T) ** 2

    @property
    def gamma_R(self) -> float:
        return C_LIGHT**2 / (4.0 * math.pi * self.f_R) ** 2


@dataclass(frozen=True)
class BlockageParams:
    lambda_B: float  # blocker density, 1/m^2
    r_B: float       # blocker radius, m
    h_B: float       # blocker height, m

    def beta(self, h_A: float, h_U: float) -> float:
        """Effective LOS-blocking rate 2 lambda_B r_B |h_B-h_U| / |h_A-h_U|."""
        return 2.0 * self.lambda_B * self.r_B * abs(self.h_B - h_U) / abs(h_A - h_U)


@dataclass(frozen=True)
class AntennaParams:
    g_T_max: float      # AP main-lobe gain, linear
    g_T_min: float      # AP side-lobe gain, linear
    g_U_max: float      # UE main-lobe gain, linear
    g_U_min: float      # UE side-lobe gain, linear
    phi_T: float        # AP beamwidth, rad
    phi_U: float        # UE beamwidth, rad
    sigma_eps_T: float  # AP beam-steering error std-dev, rad
    sigma_eps_U: float  # UE beam-steering error std-dev, rad


@dataclass(frozen=True)
class NetworkConfig:
    geometry: GeometryParams
    radio: RadioParams
    blockage: BlockageParams
    antenna: AntennaParams

    def __post_init__(self):
        _validate(self)


class DerivedConstants(NamedTuple):
    gamma_T: float
    gamma_R: float
    beta: float
    delta_h: float


def derived_constants(cfg: NetworkConfig) -> DerivedConstants:
    """The handful of derived quantities every other module shares."""
    g = cfg.geometry
    return DerivedConstants(
        gamma_T=cfg.radio.gamma_T,
        gamma_R=cfg.radio.gamma_R,
        beta=cfg.blockage.beta(g.h_A, g.h_U),
        delta_h=g.h_A - g.h_U,
    )


def _require(key, value, ok: bool, bound: str):
    if not ok:
        raise OutOfRange(key, value, bound)


def _validate(cfg: NetworkConfig) -> None:
    g, r, b, a = cfg.geometry, cfg.radio, cfg.blockage, cfg.antenna

    _require("r_d", g.r_d, g.r_d > 0, "r_d > 0")
    _require("h_U", g.h_U, g.h_U >= 0, "h_U >= 0")
    _require("h_A", g.h_A, g.h_A > g.h_U, "h_A > h_U")
    _require("v_0", g.v_0, 0 <= g.v_0 <= g.r_d, "0 <= v_0 <= r_d")
    _require("N_A", g.N_A, g.N_A >= 1 and g.N_A == int(g.N_A), "N_A integer >= 1")
    _require("delta_T", g.delta_T, 0.0 <= g.delta_T <= 1.0, "0 <= delta_T <= 1")
    n_thz = g.delta_T * g.N_A
    if abs(n_thz - round(n_thz)) > THZ_COUNT_TOL:
        raise NonIntegerThzCount(g.delta_T, g.N_A)

    for key in ("P_T", "P_R", "f_T", "f_R", "W_T", "W_R", "sigma2_T", "sigma2_R"):
        val = getattr(r, key)
        _require(key, val, val > 0, f"{key} > 0")
    _require("k_a", r.k_a, r.k_a >= 0, "k_a >= 0")
    for key in ("alpha_R", "alpha_L", "alpha_N"):
        val = getattr(r, key)
        _require(key, val, val >= 2, f"{key} >= 2")
    for key in ("m_L", "m_N"):
        val = getattr(r, key)
        _require(key, val, val == int(val) and 1 <= val <= MAX_NAKAGAMI_M,
                 f"{key} integer in [1, {MAX_NAKAGAMI_M}]")
    _require("B_T", r.B_T, r.B_T >= 0, "B_T >= 0")
    _require("theta", r.theta, r.theta > 0, "theta > 0 (linear)")

    _require("lambda_B", b.lambda_B, b.lambda_B >= 0, "lambda_B >= 0")
    _require("r_B", b.r_B, b.r_B >= 0, "r_B >= 0")
    _require("h_B", b.h_B, b.h_B > 0, "h_B > 0")

    for side in ("T", "U"):
        gmax = getattr(a, f"g_{side}_max")
        gmin = getattr(a, f"g_{side}_min")
        _require(f"g_{side}_min", gmin, gmin > 0, f"g_{side}_min > 0")
        _require(f"g_{side}_max", gmax, gmax >= gmin, f"g_{side}_max >= g_{side}_min")
        phi = getattr(a, f"phi_{side}")
        _require(f"phi_{side}", phi, 0 < phi < 2 * math.pi, f"0 < phi_{side} < 2*pi")
        se = getattr(a, f"sigma_eps_{side}")
        _require(f"sigma_eps_{side}", se, se >= 0, f"sigma_eps_{side} >= 0")


# --- text config format ------------------------------------------------------
#
# One `key = value` per line, `#` comments, sections [geometry] [radio]
# [blockage] [antenna].  Key names are exactly the field names; dB/degree
# variants carry a unit suffix.  Conversion kinds:
#   plain  - stored as given
#   int    - integer
#   power  - watts, or dBm via `<key>_dbm`
#   gain   - linear, or dB via `<key>_db`
#   angle  - radians, or degrees via `<key>_deg`

_SCHEMA = {
    "geometry": {
        "r_d": "plain", "h_A": "plain", "h_U": "plain", "v_0": "plain",
        "N_A": "int", "delta_T": "plain",
    },
    "radio": {
        "P_T": "power", "P_R": "power", "f_T": "plain", "f_R": "plain",
        "W_T": "plain", "W_R": "plain", "k_a": "plain",
        "alpha_R": "plain", "alpha_L": "plain", "alpha_N": "plain",
        "m_L": "int", "m_N": "int",
        "sigma2_T": "power", "sigma2_R": "power",
        "B_T": "gain", "theta": "gain",
    },
    "blockage": {"lambda_B": "plain", "r_B": "plain", "h_B": "plain"},
    "antenna": {
        "g_T_max": "gain", "g_T_min": "gain", "g_U_max": "gain", "g_U_min": "gain",
        "phi_T": "angle", "phi_U": "angle",
        "sigma_eps_T": "angle", "sigma_eps_U": "angle",
    },
}

_SUFFIX = {"power": "_dbm", "gain": "_db", "angle": "_deg"}

#: keys that may be omitted, with their SI default (B_T is absent from typical
#: scenario tables; 1 means unbiased max-power association)
_DEFAULTS = {("radio", "B_T"): 1.0}


def _convert(kind: str, raw: str, suffixed: bool, key: str):
    try:
        val = float(raw)
    except ValueError as exc:
        raise ConfigError(f"key '{key}': cannot parse number from {raw!r}") from exc
    if kind == "int":
        if val != int(val):
            raise OutOfRange(key, val, "integer expected")
        return int(val)
    if not suffixed:
        return val
    if kind == "power":
        return dbm_to_watt(val)
    if kind == "gain":
        return from_db(val)
    if kind == "angle":
        return math.radians(val)
    raise AssertionError(kind)


def load_config(text: str) -> NetworkConfig:
    """Parse a configuration document into a validated NetworkConfig."""
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#",), comment_prefixes=("#",), strict=True,
        interpolation=None,
    )
    parser.optionxform = str  # keep key case
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    unknown_sections = set(parser.sections()) - set(_SCHEMA)
    if unknown_sections:
        raise ConfigError(f"unknown section(s): {sorted(unknown_sections)}")

    out: dict[str, dict] = {}
    for section, keys in _SCHEMA.items():
        if section not in parser:
            raise MissingKey(section, f"[{section}] section")
        present = dict(parser[section])
        values = {}
        for key, kind in keys.items():
            candidates = [(key, False)]
            if kind in _SUFFIX:
                candidates.append((key + _SUFFIX[kind], True))
            found = [(k, sfx) for k, sfx in candidates if k in present]
            if len(found) > 1:
                raise ConfigError(
                    f"section [{section}] defines both "
                    f"{found[0][0]!r} and {found[1][0]!r}"
                )
            if not found:
                if (section, key) in _DEFAULTS:
                    values[key] = _DEFAULTS[(section, key)]
                    continue
                raise MissingKey(section, key)
            name, suffixed = found[0]
            values[key] = _convert(kind, present.pop(name), suffixed, name)
        if present:
            raise ConfigError(
                f"unknown key(s) in section [{section}]: {sorted(present)}"
            )
        out[section] = values

    return NetworkConfig(
        geometry=GeometryParams(**out["geometry"]),
        radio=RadioParams(**out["radio"]),
        blockage=BlockageParams(**out["blockage"]),
        antenna=AntennaParams(**out["antenna"]),
    )


def serialize_config(cfg: NetworkConfig) -> str:
    """Canonical SI-linear text form; load_config(serialize_config(c)) == c."""
    parts = {
        "geometry": cfg.geometry, "radio": cfg.radio,
        "blockage": cfg.blockage, "antenna": cfg.antenna,
    }
    buf = io.StringIO()
    for section, obj in parts.items():
        buf.write(f"[{section}]\n")
        for key in _SCHEMA[section]:
            buf.write(f"{key} = {getattr(obj, key)!r}\n")
        buf.write("\n")
    return buf.getvalue()


def load_config_file(path) -> NetworkConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return load_config(fh.read())


def with_updates(cfg: NetworkConfig, **updates) -> NetworkConfig:
    """Return a revalidated copy with scalar fields replaced by name.

    Accepts any field of the four parameter groups, e.g.
    ``with_updates(cfg, B_T=10.0, delta_T=0.5)``.
    """
    groups = {"geometry": {}, "radio": {}, "blockage": {}, "antenna": {}}
    for key, value in updates.items():
        for section, keys in _SCHEMA.items():
            if key in keys:
                groups[section][key] = value
                break
        else:
            raise KeyError(f"unknown config field {key!r}")
    new = cfg
    for section, vals in groups.items():
        if vals:
            new = replace(new, **{section: replace(getattr(new, section), **vals)})
    return new

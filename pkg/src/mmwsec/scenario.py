"""Canonical network parameterization shared by analysis and simulation.

All gains and powers are stored in linear units; decibels appear only at
the I/O boundary (config files, presets, reports).  Beamwidths are stored
in degrees because the sector probabilities divide by 180: a boresight
offset theta uniform on [-180, 180) falls inside the main lobe when
|theta| <= beamwidth_deg, which happens with probability beamwidth_deg/180.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union


class ScenarioError(ValueError):
    """Invalid, inconsistent, or unparseable scenario description."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    if not value > 0:
        raise ScenarioError(f"cannot express nonpositive value {value} in dB")
    return 10.0 * math.log10(value)


def noise_power(bandwidth_hz: float, noise_figure_db: float) -> float:
    """Thermal noise power (linear) for a given bandwidth and noise figure.

    N0(dB) = -174 + 10 log10(BW) + F_dB.
    """
    if not bandwidth_hz > 0:
        raise ScenarioError(f"bandwidth must be positive, got {bandwidth_hz}")
    n0_db = -174.0 + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return db_to_linear(n0_db)


def rate_to_threshold(rate_bits: float) -> float:
    """SINR threshold equivalent to a code rate in bits/s/Hz: T = 2^R - 1."""
    if not rate_bits > 0:
        raise ScenarioError(f"rate must be positive, got {rate_bits}")
    return 2.0**rate_bits - 1.0


@dataclass(frozen=True)
class BlockageModel:
    """LOS-ball blockage: links shorter than los_radius_m are line-of-sight
    with probability los_fraction, never beyond."""

    los_fraction: float
    los_radius_m: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.los_fraction <= 1.0:
            raise ScenarioError(
                f"blockage.los_fraction must lie in [0, 1], got {self.los_fraction}"
            )
        if not self.los_radius_m > 0:
            raise ScenarioError(
                f"blockage.los_radius_m must be positive, got {self.los_radius_m}"
            )


@dataclass(frozen=True)
class PathLossModel:
    """Dual-slope path loss with separate LOS/NLOS exponents and intercepts."""

    alpha_los: float
    alpha_nlos: float
    beta_los_db: float
    beta_nlos_db: float

    def __post_init__(self) -> None:
        if not self.alpha_los > 0 or not self.alpha_nlos > 0:
            raise ScenarioError("pathloss exponents must be positive")
        if not self.alpha_los < self.alpha_nlos:
            raise ScenarioError(
                "pathloss requires alpha_los < alpha_nlos, got "
                f"{self.alpha_los} vs {self.alpha_nlos}"
            )
        if not self.c_los > self.c_nlos:
            raise ScenarioError(
                "pathloss requires a larger LOS intercept (beta_los_db < beta_nlos_db), "
                f"got {self.beta_los_db} vs {self.beta_nlos_db}"
            )

    @property
    def c_los(self) -> float:
        return db_to_linear(-self.beta_los_db)

    @property
    def c_nlos(self) -> float:
        return db_to_linear(-self.beta_nlos_db)

    def intercept(self, los: bool) -> float:
        return self.c_los if los else self.c_nlos

    def exponent(self, los: bool) -> float:
        return self.alpha_los if los else self.alpha_nlos


@dataclass(frozen=True)
class FadingParams:
    """Nakagami shapes (positive integers); link power gains are
    gamma(shape, 1) distributed."""

    nakagami_los: int
    nakagami_nlos: int

    def __post_init__(self) -> None:
        for name in ("nakagami_los", "nakagami_nlos"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ScenarioError(f"fading.{name} must be an integer >= 1, got {value!r}")

    def shape(self, los: bool) -> int:
        return self.nakagami_los if los else self.nakagami_nlos


@dataclass(frozen=True)
class AntennaPattern:
    """Two-level sectored beam: main lobe main_gain over |theta| <= beamwidth_deg,
    sidelobe side_gain elsewhere (linear power gains)."""

    main_gain: float
    side_gain: float
    beamwidth_deg: float

    def __post_init__(self) -> None:
        if not self.main_gain > self.side_gain > 0:
            raise ScenarioError(
                "antenna gains must satisfy main_gain > side_gain > 0, got "
                f"{self.main_gain} vs {self.side_gain}"
            )
        if not 0.0 < self.beamwidth_deg < 180.0:
            raise ScenarioError(
                f"antenna.beamwidth_deg must lie in (0, 180), got {self.beamwidth_deg}"
            )

    @property
    def main_lobe_prob(self) -> float:
        return self.beamwidth_deg / 180.0

    @property
    def side_lobe_prob(self) -> float:
        return (180.0 - self.beamwidth_deg) / 180.0


@dataclass(frozen=True)
class AnPattern:
    """Sectored beam with an artificial-noise split: fraction power_split of
    the transmit power carries the information signal at gain info_gain
    inside the sector, the rest is jamming at gain an_gain outside it.
    Sidelobes of both signals are suppressed to zero."""

    info_gain: float
    an_gain: float
    beamwidth_deg: float
    power_split: float

    def __post_init__(self) -> None:
        if not self.info_gain > 0 or not self.an_gain > 0:
            raise ScenarioError("an antenna gains must be positive")
        if not 0.0 < self.beamwidth_deg < 180.0:
            raise ScenarioError(
                f"antenna.beamwidth_deg must lie in (0, 180), got {self.beamwidth_deg}"
            )
        if not 0.0 <= self.power_split <= 1.0:
            raise ScenarioError(
                f"antenna.power_split must lie in [0, 1], got {self.power_split}"
            )

    @property
    def info_sector_prob(self) -> float:
        return self.beamwidth_deg / 180.0

    @property
    def an_sector_prob(self) -> float:
        return (180.0 - self.beamwidth_deg) / 180.0


Antenna = Union[AntennaPattern, AnPattern]


@dataclass(frozen=True)
class ScenarioParams:
    """Immutable full parameterization of one network scenario.

    The noise power is always derived from bandwidth and noise figure,
    never stored, so the two can not drift apart.
    """

    bs_intensity: float
    eve_intensity: float
    tx_power: float
    bandwidth_hz: float
    noise_figure_db: float
    blockage: BlockageModel
    pathloss: PathLossModel
    fading: FadingParams
    antenna: Antenna
    t_c: float
    t_e: float
    eavesdropper_mode: str = "non_colluding"

    def __post_init__(self) -> None:
        if self.bs_intensity < 0 or self.eve_intensity < 0:
            raise ScenarioError("intensities must be nonnegative")
        if not self.tx_power > 0:
            raise ScenarioError(f"tx_power must be positive, got {self.tx_power}")
        if not self.bandwidth_hz > 0:
            raise ScenarioError(f"bandwidth must be positive, got {self.bandwidth_hz}")
        if not self.t_c > 0 or not self.t_e > 0:
            raise ScenarioError("thresholds must be positive (linear)")
        if self.eavesdropper_mode not in ("non_colluding", "colluding"):
            raise ScenarioError(
                f"eavesdropper_mode must be 'non_colluding' or 'colluding', "
                f"got {self.eavesdropper_mode!r}"
            )

    @property
    def noise(self) -> float:
        return noise_power(self.bandwidth_hz, self.noise_figure_db)

    @property
    def an(self) -> AnPattern:
        if not isinstance(self.antenna, AnPattern):
            raise ScenarioError("scenario does not use an artificial-noise antenna")
        return self.antenna

    @property
    def plain(self) -> AntennaPattern:
        if not isinstance(self.antenna, AntennaPattern):
            raise ScenarioError("scenario does not use a plain beamforming antenna")
        return self.antenna

    def replace(self, **kwargs) -> "ScenarioParams":
        from dataclasses import replace as _replace

        return _replace(self, **kwargs)


@dataclass(frozen=True)
class MicrowaveParams:
    """Single-slope interference-limited baseline network (simulation only).

    Rayleigh fading, no blockage, noise ignored; the information/jamming
    gain ratio equals n_antennas - 1.
    """

    bs_intensity: float
    eve_intensity: float
    pathloss_exponent: float = 2.7
    n_antennas: int = 6
    beamwidth_deg: float = 30.0
    power_split: float = 0.5
    t_c: float = 1.0
    t_e: float = 1.0

    def __post_init__(self) -> None:
        if self.bs_intensity < 0 or self.eve_intensity < 0:
            raise ScenarioError("intensities must be nonnegative")
        if not self.pathloss_exponent > 2:
            raise ScenarioError("microwave pathloss exponent must exceed 2")
        if self.n_antennas < 2:
            raise ScenarioError("microwave baseline needs at least 2 antennas")
        if not 0.0 < self.beamwidth_deg < 180.0:
            raise ScenarioError("beamwidth_deg must lie in (0, 180)")
        if not 0.0 <= self.power_split <= 1.0:
            raise ScenarioError("power_split must lie in [0, 1]")

    @property
    def info_gain(self) -> float:
        return float(self.n_antennas - 1)

    @property
    def an_gain(self) -> float:
        return 1.0

    @property
    def info_sector_prob(self) -> float:
        return self.beamwidth_deg / 180.0

    @property
    def an_sector_prob(self) -> float:
        return (180.0 - self.beamwidth_deg) / 180.0


# ---------------------------------------------------------------------------
# Config file ingestion (JSON, strict keys, dB at the boundary)
# ---------------------------------------------------------------------------

_TOP_KEYS = {
    "bs_intensity",
    "eve_intensity",
    "tx_power_db",
    "bandwidth_hz",
    "noise_figure_db",
    "blockage",
    "pathloss",
    "fading",
    "antenna",
    "thresholds",
    "eavesdropper_mode",
}


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ScenarioError(f"missing field '{where}{key}'")
    return section[key]


def _check_keys(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ScenarioError(
            f"unknown key(s) {sorted(unknown)} in '{where or 'scenario'}'"
        )


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"field '{where}' must be a number, got {value!r}")
    return float(value)


def _threshold_from(section: dict, suffix: str) -> float:
    db_key, rate_key = f"t_{suffix}_db", f"rate_{suffix}_bits"
    has_db, has_rate = db_key in section, rate_key in section
    if has_db == has_rate:
        raise ScenarioError(
            f"thresholds must contain exactly one of '{db_key}' or '{rate_key}'"
        )
    if has_db:
        return db_to_linear(_number(section[db_key], f"thresholds.{db_key}"))
    return rate_to_threshold(_number(section[rate_key], f"thresholds.{rate_key}"))


def scenario_from_dict(data: dict) -> ScenarioParams:
    if not isinstance(data, dict):
        raise ScenarioError(f"scenario document must be an object, got {type(data).__name__}")
    _check_keys(data, _TOP_KEYS, "")

    blockage_raw = _require(data, "blockage", "")
    _check_keys(blockage_raw, {"los_fraction", "los_radius_m"}, "blockage")
    blockage = BlockageModel(
        los_fraction=_number(_require(blockage_raw, "los_fraction", "blockage."), "blockage.los_fraction"),
        los_radius_m=_number(_require(blockage_raw, "los_radius_m", "blockage."), "blockage.los_radius_m"),
    )

    pl_raw = _require(data, "pathloss", "")
    _check_keys(pl_raw, {"alpha_los", "alpha_nlos", "beta_los_db", "beta_nlos_db"}, "pathloss")
    pathloss = PathLossModel(
        alpha_los=_number(_require(pl_raw, "alpha_los", "pathloss."), "pathloss.alpha_los"),
        alpha_nlos=_number(_require(pl_raw, "alpha_nlos", "pathloss."), "pathloss.alpha_nlos"),
        beta_los_db=_number(_require(pl_raw, "beta_los_db", "pathloss."), "pathloss.beta_los_db"),
        beta_nlos_db=_number(_require(pl_raw, "beta_nlos_db", "pathloss."), "pathloss.beta_nlos_db"),
    )

    fading_raw = _require(data, "fading", "")
    _check_keys(fading_raw, {"nakagami_los", "nakagami_nlos"}, "fading")

    def _shape(key: str) -> int:
        value = _require(fading_raw, key, "fading.")
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioError(f"field 'fading.{key}' must be an integer, got {value!r}")
        return value

    fading = FadingParams(nakagami_los=_shape("nakagami_los"), nakagami_nlos=_shape("nakagami_nlos"))

    antenna_raw = _require(data, "antenna", "")
    kind = _require(antenna_raw, "kind", "antenna.")
    if kind == "beamforming":
        _check_keys(antenna_raw, {"kind", "main_gain_db", "side_gain_db", "beamwidth_deg"}, "antenna")
        antenna: Antenna = AntennaPattern(
            main_gain=db_to_linear(_number(_require(antenna_raw, "main_gain_db", "antenna."), "antenna.main_gain_db")),
            side_gain=db_to_linear(_number(_require(antenna_raw, "side_gain_db", "antenna."), "antenna.side_gain_db")),
            beamwidth_deg=_number(_require(antenna_raw, "beamwidth_deg", "antenna."), "antenna.beamwidth_deg"),
        )
    elif kind == "an":
        _check_keys(antenna_raw, {"kind", "info_gain_db", "an_gain_db", "beamwidth_deg", "power_split"}, "antenna")
        antenna = AnPattern(
            info_gain=db_to_linear(_number(_require(antenna_raw, "info_gain_db", "antenna."), "antenna.info_gain_db")),
            an_gain=db_to_linear(_number(_require(antenna_raw, "an_gain_db", "antenna."), "antenna.an_gain_db")),
            beamwidth_deg=_number(_require(antenna_raw, "beamwidth_deg", "antenna."), "antenna.beamwidth_deg"),
            power_split=_number(_require(antenna_raw, "power_split", "antenna."), "antenna.power_split"),
        )
    else:
        raise ScenarioError(f"antenna.kind must be 'beamforming' or 'an', got {kind!r}")

    thresholds_raw = _require(data, "thresholds", "")
    _check_keys(thresholds_raw, {"t_c_db", "rate_c_bits", "t_e_db", "rate_e_bits"}, "thresholds")

    return ScenarioParams(
        bs_intensity=_number(_require(data, "bs_intensity", ""), "bs_intensity"),
        eve_intensity=_number(_require(data, "eve_intensity", ""), "eve_intensity"),
        tx_power=db_to_linear(_number(_require(data, "tx_power_db", ""), "tx_power_db")),
        bandwidth_hz=_number(_require(data, "bandwidth_hz", ""), "bandwidth_hz"),
        noise_figure_db=_number(_require(data, "noise_figure_db", ""), "noise_figure_db"),
        blockage=blockage,
        pathloss=pathloss,
        fading=fading,
        antenna=antenna,
        t_c=_threshold_from(thresholds_raw, "c"),
        t_e=_threshold_from(thresholds_raw, "e"),
        eavesdropper_mode=data.get("eavesdropper_mode", "non_colluding"),
    )


def scenario_to_dict(params: ScenarioParams) -> dict:
    """Serialize back to the config-file form (dB at the boundary)."""
    if isinstance(params.antenna, AnPattern):
        antenna = {
            "kind": "an",
            "info_gain_db": linear_to_db(params.antenna.info_gain),
            "an_gain_db": linear_to_db(params.antenna.an_gain),
            "beamwidth_deg": params.antenna.beamwidth_deg,
            "power_split": params.antenna.power_split,
        }
    else:
        antenna = {
            "kind": "beamforming",
            "main_gain_db": linear_to_db(params.antenna.main_gain),
            "side_gain_db": linear_to_db(params.antenna.side_gain),
            "beamwidth_deg": params.antenna.beamwidth_deg,
        }
    return {
        "bs_intensity": params.bs_intensity,
        "eve_intensity": params.eve_intensity,
        "tx_power_db": linear_to_db(params.tx_power),
        "bandwidth_hz": params.bandwidth_hz,
        "noise_figure_db": params.noise_figure_db,
        "blockage": {
            "los_fraction": params.blockage.los_fraction,
            "los_radius_m": params.blockage.los_radius_m,
        },
        "pathloss": {
            "alpha_los": params.pathloss.alpha_los,
            "alpha_nlos": params.pathloss.alpha_nlos,
            "beta_los_db": params.pathloss.beta_los_db,
            "beta_nlos_db": params.pathloss.beta_nlos_db,
        },
        "fading": {
            "nakagami_los": params.fading.nakagami_los,
            "nakagami_nlos": params.fading.nakagami_nlos,
        },
        "antenna": antenna,
        "thresholds": {
            "t_c_db": linear_to_db(params.t_c),
            "t_e_db": linear_to_db(params.t_e),
        },
        "eavesdropper_mode": params.eavesdropper_mode,
    }


def load_scenario(path: Union[str, Path]) -> ScenarioParams:
    """Load and fully validate a scenario config file (JSON)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"scenario file {path} is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    try:
        return scenario_from_dict(data)
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def save_scenario(params: ScenarioParams, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(params), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Figure presets
# ---------------------------------------------------------------------------

_PATHLOSS_28GHZ = PathLossModel(alpha_los=2.0, alpha_nlos=2.92, beta_los_db=61.4, beta_nlos_db=72.0)
_FADING_DEFAULT = FadingParams(nakagami_los=3, nakagami_nlos=2)
_BLOCKAGE_28GHZ = BlockageModel(los_fraction=0.12, los_radius_m=200.0)
_BLOCKAGE_CHICAGO = BlockageModel(los_fraction=0.081, los_radius_m=250.0)

_BEAM_NARROW = AntennaPattern(
    main_gain=db_to_linear(15.0), side_gain=db_to_linear(-3.0), beamwidth_deg=9.0
)


def _an_pattern(info_db: float = 15.0, an_db: float = 3.0, beamwidth: float = 9.0, split: float = 0.5) -> AnPattern:
    return AnPattern(
        info_gain=db_to_linear(info_db),
        an_gain=db_to_linear(an_db),
        beamwidth_deg=beamwidth,
        power_split=split,
    )


def _base(**overrides) -> ScenarioParams:
    defaults = dict(
        bs_intensity=5e-4,
        eve_intensity=1e-4,
        tx_power=db_to_linear(30.0),
        bandwidth_hz=2e9,
        noise_figure_db=10.0,
        blockage=_BLOCKAGE_28GHZ,
        pathloss=_PATHLOSS_28GHZ,
        fading=_FADING_DEFAULT,
        antenna=_BEAM_NARROW,
        t_c=db_to_linear(10.0),
        t_e=db_to_linear(0.0),
        eavesdropper_mode="non_colluding",
    )
    defaults.update(overrides)
    return ScenarioParams(**defaults)


_PRESET_BUILDERS = {
    # Secure connectivity vs eavesdropper intensity, non-colluding.
    "fig1": lambda: _base(),
    # Secure connectivity vs eavesdropper intensity, colluding; curves at
    # bs_intensity 5e-4 / 2e-4 / 6e-5 (base carries the middle one).
    "fig2": lambda: _base(bs_intensity=2e-4, eavesdropper_mode="colluding"),
    # Colluding secrecy probability vs the wiretap threshold.
    "fig3": lambda: _base(
        blockage=_BLOCKAGE_CHICAGO, eavesdropper_mode="colluding"
    ),
    # AN connection probability vs the connection threshold (two BS
    # intensities in the figure; base carries the denser one).
    "fig4": lambda: _base(bs_intensity=1e-3, antenna=_an_pattern()),
    # AN secrecy probability vs the wiretap threshold (two eavesdropper
    # intensities in the figure).
    "fig5": lambda: _base(bs_intensity=5e-5, antenna=_an_pattern()),
    # Noise-limited perfect-link density vs eavesdropper intensity.
    "fig6": lambda: _base(bs_intensity=2e-4),
    # AN perfect-link density vs the power split (several eavesdropper
    # intensities in the figure).
    "fig7": lambda: _base(bs_intensity=8e-4, eve_intensity=5e-4, antenna=_an_pattern()),
    # AN perfect-link density vs the power split across beamwidths.
    "fig8": lambda: _base(
        bs_intensity=8e-4, eve_intensity=1e-3, antenna=_an_pattern(beamwidth=30.0)
    ),
    # mmWave vs microwave comparison (paired with microwave_preset()).
    "fig9": lambda: _base(
        bs_intensity=8e-4,
        antenna=_an_pattern(),
        t_c=db_to_linear(0.0),
        t_e=db_to_linear(-30.0),
    ),
}

PRESET_NAMES = tuple(sorted(_PRESET_BUILDERS))


def preset(name: str) -> ScenarioParams:
    """Parameter set of one of the reproduced figure scenarios (fig1..fig9)."""
    try:
        builder = _PRESET_BUILDERS[name]
    except KeyError:
        raise ScenarioError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        ) from None
    return builder()


def microwave_preset() -> MicrowaveParams:
    """Baseline microwave network paired with the fig9 comparison."""
    return MicrowaveParams(
        bs_intensity=8e-4,
        eve_intensity=1e-4,
        pathloss_exponent=2.7,
        n_antennas=6,
        beamwidth_deg=30.0,
        power_split=0.5,
        t_c=db_to_linear(0.0),
        t_e=db_to_linear(-30.0),
    )

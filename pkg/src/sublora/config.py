"""Flat key-value experiment configuration with preset defaults.

Format: one `section.key = value` per line, `#` comments, comma lists for
sweep axes. The fully resolved mapping is embedded in every CSV header so a
result file is regenerable on its own.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass

import numpy as np

from . import energy
from .errors import ConfigError
from .linkbudget import RadioConfig
from .network import Scenario
from .phy import LoRaParams
from .soil import SoilProfile

DEFAULTS = {
    "scenario.n_devices": 10000,
    "scenario.report_period_s": 1800.0,
    "scenario.wet_duration_s": 0.0,
    "scenario.sf": 9,
    "scenario.n_channels": 64,
    "scenario.placement": "disk_uniform",
    "scenario.burial_depth_m": 0.6,
    "scenario.hap_altitude_m": 20000.0,
    "scenario.elevation_min_deg": 30.0,
    "scenario.freeze_geometry": False,
    "soil.clay_fraction": 0.1686,
    "soil.vwc": 0.119,
    "soil.frequency_hz": 868e6,
    "radio.tx_power_dbm": 14.0,
    "radio.tx_gain_dbi": 2.15,
    "radio.rx_gain_dbi": 25.0,
    "radio.noise_power_dbm": -117.0,
    "radio.path_loss_exponent": 2.0,
    "radio.coverage_radius_m": 35000.0,
    "lora.bandwidth_hz": 125000.0,
    "lora.app_payload_bytes": 10,
    "lora.mac_overhead_bytes": 13,
    "lora.preamble_symbols": 8,
    "lora.cr_denom_extra": 1,
    "lora.explicit_header": True,
    "lora.crc": True,
    "harvest.received_power_w": 0.02,
    "harvest.conversion_efficiency": 0.6,
    "battery.capacity_mah": 3000.0,
    "battery.voltage_v": 3.3,
    "run.seed": 1,
    "run.trials": 200,
    "run.energy_profile": "calibrated",
    "run.toa_source": "computed",
    "run.interference": "aggregate",
    "calibration.anchor_lifetime_years": 30.5,
    "calibration.sf": 9,
    "calibration.t_w_s": 1200.0,
    "sweep.burial_depth_m": [0.4, 0.6],
    "sweep.vwc": [0.05, 0.119],
    "sweep.sf": [7, 8, 9, 10, 11, 12],
    "sweep.t_w_s": [float(t) for t in range(60, 1800, 60)],
    "sweep.n_devices": [1000, 5000, 10000, 20000],
    "sweep.report_period_s": [900.0, 1800.0],
    "sweep.received_power_w": [0.0, 0.02],
}

# Per-preset overrides applied on top of DEFAULTS, below any config file.
PRESETS = {
    "fig3": {"scenario.wet_duration_s": 0.0},
    "fig4": {},
    "fig5": {"run.trials": 40},
    "run": {},
    "optimize": {},
    "calibrate": {},
}


def _coerce(text: str):
    s = text.strip()
    if "," in s:
        return [_coerce(part) for part in s.split(",") if part.strip() != ""]
    if s.lower() in ("true", "false"):
        return s.lower() == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        pass
    return s


def parse_config_file(path) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value': {raw.rstrip()}")
            key = key.strip()
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _coerce(value)
    return values


@dataclass
class ExperimentConfig:
    values: dict

    @classmethod
    def load(cls, preset: str = "run", path=None, overrides: dict | None = None):
        values = dict(DEFAULTS)
        values.update(PRESETS.get(preset, {}))
        if path is not None:
            values.update(parse_config_file(path))
        for key, val in (overrides or {}).items():
            if val is None:
                continue
            if key not in DEFAULTS:
                raise ConfigError(f"unknown override key {key!r}")
            values[key] = val
        return cls(values)

    def __getitem__(self, key):
        return self.values[key]

    def list_of(self, key) -> list:
        v = self.values[key]
        return list(v) if isinstance(v, list) else [v]

    def resolved_items(self):
        return sorted(self.values.items(), key=lambda kv: kv[0])

    # -- object builders -------------------------------------------------

    def point_seeds(self, point_index: int):
        """Two decorrelated 64-bit seeds for one sweep point."""
        ss = np.random.SeedSequence((int(self.values["run.seed"]), int(point_index)))
        g, t = ss.generate_state(2, dtype=np.uint64)
        return int(g), int(t)

    def soil(self, vwc=None) -> SoilProfile:
        return SoilProfile(
            clay_fraction=self.values["soil.clay_fraction"],
            vwc=self.values["soil.vwc"] if vwc is None else vwc,
            frequency_hz=self.values["soil.frequency_hz"],
        )

    def radio(self) -> RadioConfig:
        return RadioConfig(
            tx_power_dbm=self.values["radio.tx_power_dbm"],
            tx_gain_dbi=self.values["radio.tx_gain_dbi"],
            rx_gain_dbi=self.values["radio.rx_gain_dbi"],
            noise_power_dbm=self.values["radio.noise_power_dbm"],
            path_loss_exponent=self.values["radio.path_loss_exponent"],
            coverage_radius_m=self.values["radio.coverage_radius_m"],
        )

    def lora(self, sf: int) -> LoRaParams:
        return LoRaParams(
            sf=sf,
            bandwidth_hz=self.values["lora.bandwidth_hz"],
            cr_denom_extra=self.values["lora.cr_denom_extra"],
            app_payload_bytes=self.values["lora.app_payload_bytes"],
            mac_overhead_bytes=self.values["lora.mac_overhead_bytes"],
            preamble_symbols=self.values["lora.preamble_symbols"],
            explicit_header=self.values["lora.explicit_header"],
            crc=self.values["lora.crc"],
        )

    def scenario(self, point_index: int = 0, *, sf=None, wet_duration_s=None,
                 n_devices=None, report_period_s=None, burial_depth_m=None,
                 vwc=None, trials=None) -> Scenario:
        v = self.values
        sf = v["scenario.sf"] if sf is None else sf
        gseed, tseed = self.point_seeds(point_index)
        return Scenario(
            n_devices=int(v["scenario.n_devices"] if n_devices is None else n_devices),
            report_period_s=float(v["scenario.report_period_s"]
                                  if report_period_s is None else report_period_s),
            wet_duration_s=float(v["scenario.wet_duration_s"]
                                 if wet_duration_s is None else wet_duration_s),
            sf=int(sf),
            n_channels=int(v["scenario.n_channels"]),
            placement=v["scenario.placement"],
            soil=self.soil(vwc=vwc),
            burial_depth_m=float(v["scenario.burial_depth_m"]
                                 if burial_depth_m is None else burial_depth_m),
            radio=self.radio(),
            hap_altitude_m=float(v["scenario.hap_altitude_m"]),
            elevation_min_deg=float(v["scenario.elevation_min_deg"]),
            lora=self.lora(int(sf)),
            toa_source=v["run.toa_source"],
            interference=v["run.interference"],
            geometry_seed=gseed,
            traffic_seed=tseed,
            trials=int(v["run.trials"] if trials is None else trials),
            freeze_geometry=bool(v["scenario.freeze_geometry"]),
        )

    def battery(self) -> energy.Battery:
        return energy.Battery(capacity_mah=self.values["battery.capacity_mah"],
                              voltage_v=self.values["battery.voltage_v"])

    def harvest(self, received_power_w=None) -> energy.HarvestConfig:
        return energy.HarvestConfig(
            received_power_w=(self.values["harvest.received_power_w"]
                              if received_power_w is None else received_power_w),
            conversion_efficiency=self.values["harvest.conversion_efficiency"],
        )

    def energy_profile(self) -> energy.ClassAProfile:
        return load_named_profile(self.values["run.energy_profile"])


def load_named_profile(name: str) -> energy.ClassAProfile:
    """Packaged profile by name ('default', 'calibrated') or a filesystem path."""
    import os

    if os.path.sep in str(name) or str(name).endswith(".profile"):
        if not os.path.exists(name):
            raise ConfigError(f"energy profile file not found: {name}")
        return energy.load_profile(name)
    res = importlib.resources.files("sublora").joinpath(f"profiles/{name}.profile")
    if not res.is_file():
        raise ConfigError(f"no packaged energy profile named {name!r}")
    with importlib.resources.as_file(res) as p:
        return energy.load_profile(p, name=name)

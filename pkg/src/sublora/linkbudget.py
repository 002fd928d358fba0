"""Link budget: underground loss, soil-air refraction, air path loss, SNR.

The underground term is the modified Friis loss of a buried antenna,
L_ug = 6.4 + 20log10(d) + 20log10(beta) + 8.69*alpha*d, where 8.69 = 20/ln 10
converts Np to dB. Refraction at the soil-air interface is modeled as the
normal-incidence power transmission coefficient, independent of elevation
angle (documented simplification for near-vertical exit paths; the operation
is isolated so an angle-dependent variant can replace it). The air segment is
a log-distance law with d0 = 1 m, bit-identical to free-space path loss at
exponent 2. No fading: losses are deterministic given geometry and soil.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .soil import (
    SPEED_OF_LIGHT,
    ComplexPermittivity,
    PropagationConstants,
    SoilProfile,
    complex_permittivity,
    propagation_constants,
)

NP_TO_DB = 20.0 / math.log(10.0)  # 8.6859 dB per Np


@dataclass(frozen=True)
class LinkGeometry:
    """Device burial depth plus the over-the-air geometry to the gateway."""

    burial_depth_m: float
    hap_altitude_m: float
    ground_distance_m: float

    def __post_init__(self):
        if self.burial_depth_m <= 0:
            raise DomainError(f"burial_depth_m must be > 0: {self.burial_depth_m}")
        if self.hap_altitude_m <= 0:
            raise DomainError(f"hap_altitude_m must be > 0: {self.hap_altitude_m}")
        if self.ground_distance_m < 0:
            raise DomainError(f"ground_distance_m must be >= 0: {self.ground_distance_m}")

    @property
    def slant_distance_m(self) -> float:
        return math.hypot(self.hap_altitude_m, self.ground_distance_m)

    @property
    def elevation_deg(self) -> float:
        if self.ground_distance_m == 0.0:
            return 90.0
        return math.degrees(math.atan(self.hap_altitude_m / self.ground_distance_m))


@dataclass(frozen=True)
class RadioConfig:
    """Transmit/receive chain constants (defaults: EU868 uplink to a 20 km HAP)."""

    tx_power_dbm: float = 14.0
    tx_gain_dbi: float = 2.15
    rx_gain_dbi: float = 25.0
    noise_power_dbm: float = -117.0
    path_loss_exponent: float = 2.0
    coverage_radius_m: float = 35e3

    def __post_init__(self):
        if self.path_loss_exponent < 1.0:
            raise DomainError(f"path_loss_exponent must be >= 1: {self.path_loss_exponent}")
        for name in ("tx_power_dbm", "tx_gain_dbi", "rx_gain_dbi", "noise_power_dbm"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.coverage_radius_m <= 0:
            raise DomainError("coverage_radius_m must be > 0")


def underground_path_loss(burial_depth_m: float, pc: PropagationConstants) -> float:
    """Modified-Friis underground loss in dB for a device at the given depth."""
    if burial_depth_m <= 0:
        raise DomainError(f"burial_depth_m must be > 0: {burial_depth_m}")
    return (
        6.4
        + 20.0 * math.log10(burial_depth_m)
        + 20.0 * math.log10(pc.beta)
        + 8.69 * pc.alpha * burial_depth_m
    )


def refraction_loss(eps_real: float) -> float:
    """Soil-air interface loss in dB (normal-incidence power transmission)."""
    if eps_real < 1.0:
        raise DomainError(f"eps_real must be >= 1: {eps_real}")
    n = math.sqrt(eps_real)
    return -10.0 * math.log10(4.0 * n / (n + 1.0) ** 2)


def air_path_loss(slant_distance_m, frequency_hz: float, exponent: float = 2.0):
    """Log-distance air loss in dB with 1 m reference; equals FSPL at exponent 2.

    Accepts a scalar or an ndarray of distances.
    """
    d = np.asarray(slant_distance_m, dtype=float)
    if np.any(d < 1.0):
        raise DomainError("slant_distance_m must be >= 1 m")
    ref = 20.0 * math.log10(4.0 * math.pi * 1.0 * frequency_hz / SPEED_OF_LIGHT)
    loss = ref + 10.0 * exponent * np.log10(d)
    return float(loss) if np.isscalar(slant_distance_m) else loss


def soil_losses_db(soil: SoilProfile, burial_depth_m: float, model: str = "mbsdm"):
    """(underground loss, refraction loss) in dB; both geometry-independent."""
    eps = complex_permittivity(soil, model=model)
    pc = propagation_constants(eps, soil.frequency_hz)
    return underground_path_loss(burial_depth_m, pc), refraction_loss(eps.eps_real)


def received_snr(radio: RadioConfig, geometry: LinkGeometry, soil: SoilProfile,
                 model: str = "mbsdm") -> dict:
    """Received power (dBm) and SNR (dB) for one device.

    p_rx = P_tx + G_tx + G_rx - L_ug - L_r - L_air; snr = p_rx - noise.
    """
    l_ug, l_r = soil_losses_db(soil, geometry.burial_depth_m, model=model)
    l_air = air_path_loss(geometry.slant_distance_m, soil.frequency_hz,
                          radio.path_loss_exponent)
    p_rx = radio.tx_power_dbm + radio.tx_gain_dbi + radio.rx_gain_dbi - l_ug - l_r - l_air
    return {"p_rx_dbm": p_rx, "snr_db": p_rx - radio.noise_power_dbm}

"""Complex permittivity of moist soil and the derived EM propagation constants.

The dielectric model is the mineralogy-based soil dielectric model (MBSDM):
dry-soil refractive index and normalized attenuation are regressions in clay
content, the bound-water/free-water split happens at the maximum bound-water
fraction, each water class follows a single Debye relaxation with an added
conductivity loss term, and the moist-soil refractive index is assembled by
refractive mixing. Regression constants are taken verbatim from Mironov,
Kosolapova & Fomin, "Physically and Mineralogically Based Spectroscopic
Dielectric Model for Moist Soils", IEEE Trans. Geosci. Remote Sens. 47(7),
2009, and are frozen in ``MBSDM_CONSTANTS`` below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, FrequencyBandError

SPEED_OF_LIGHT = 299792458.0          # m/s
VACUUM_PERMITTIVITY = 8.854187817e-12  # F/m
VACUUM_PERMEABILITY = 4e-7 * math.pi   # H/m

# Validity band enforced as a hard error: the regressions below are only
# trusted here, and silent extrapolation would corrupt downstream sweeps.
FREQUENCY_BAND_HZ = (300e6, 3e9)

# MBSDM regression constants, Mironov et al. (2009). All regressions take the
# clay content C in PERCENT (0..100). Version 1: values as published.
MBSDM_CONSTANTS = {
    "version": 1,
    # dry soil refractive index: n_d = a0 + a1*C + a2*C^2        (eq. set for n_d)
    "nd": (1.634, -0.539e-2, 0.2748e-4),
    # dry soil normalized attenuation: k_d = b0 + b1*C
    "kd": (0.03952, -0.04038e-2),
    # maximum bound water fraction: m_vt = c0 + c1*C
    "mvt": (0.02863, 0.30673e-2),
    # bound water Debye: static permittivity, relaxation time (s), conductivity (S/m)
    "eps0_bound": (79.8, -85.4e-2, 32.7e-4),
    "tau_bound": (1.062e-11, 3.450e-12 * 1e-2),
    "sigma_bound": (0.3112, 0.467e-2),
    # free (unbound) water Debye: constants + conductivity regression
    "eps0_free": 100.0,
    "tau_free": 8.5e-12,
    "sigma_free": (0.3631, 1.217e-2),
    # high-frequency permittivity limit shared by both water classes
    "eps_inf": 4.9,
}

#: Selectable dielectric models. Only "mbsdm" ships; the slot exists so an
#: alternative soil model can be plugged in without touching call sites.
DIELECTRIC_MODELS = ("mbsdm",)


@dataclass(frozen=True)
class SoilProfile:
    """Soil composition, moisture and operating frequency.

    clay_fraction and vwc are dimensionless fractions in [0, 1); frequency is
    in Hz. The in-situ sandy-loam site used by the experiment presets is
    clay_fraction=0.1686, vwc=0.119 at 868 MHz.
    """

    clay_fraction: float
    vwc: float
    frequency_hz: float

    def __post_init__(self):
        if not 0.0 <= self.clay_fraction <= 1.0:
            raise DomainError(f"clay_fraction out of [0,1]: {self.clay_fraction}")
        if not 0.0 <= self.vwc < 1.0:
            raise DomainError(f"vwc out of [0,1): {self.vwc}")
        if self.frequency_hz <= 0.0:
            raise DomainError(f"frequency_hz must be positive: {self.frequency_hz}")


@dataclass(frozen=True)
class ComplexPermittivity:
    """Relative permittivity eps' - j*eps'' of a lossy dielectric."""

    eps_real: float
    eps_imag: float

    def __post_init__(self):
        if self.eps_real < 1.0:
            raise DomainError(f"eps_real must be >= 1: {self.eps_real}")
        if self.eps_imag < 0.0:
            raise DomainError(f"eps_imag must be >= 0: {self.eps_imag}")

    @property
    def loss_tangent(self) -> float:
        return self.eps_imag / self.eps_real


@dataclass(frozen=True)
class PropagationConstants:
    """Attenuation constant alpha (Np/m) and phase constant beta (rad/m)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0.0:
            raise DomainError(f"alpha must be >= 0: {self.alpha}")
        if self.beta <= 0.0:
            raise DomainError(f"beta must be > 0: {self.beta}")


def _debye_water(eps0_w: float, tau: float, sigma: float, f_hz: float, eps_inf: float):
    """Single Debye relaxation plus ohmic loss for one soil-water class."""
    x = 2.0 * math.pi * f_hz * tau
    eps_r = eps_inf + (eps0_w - eps_inf) / (1.0 + x * x)
    eps_i = (eps0_w - eps_inf) * x / (1.0 + x * x) + sigma / (
        2.0 * math.pi * VACUUM_PERMITTIVITY * f_hz
    )
    return eps_r, eps_i


def _refractive_index(eps_r: float, eps_i: float):
    """(n, k) such that (n - jk)^2 = eps_r - j*eps_i."""
    mag = math.hypot(eps_r, eps_i)
    return math.sqrt((mag + eps_r) / 2.0), math.sqrt((mag - eps_r) / 2.0)


def complex_permittivity(profile: SoilProfile, model: str = "mbsdm") -> ComplexPermittivity:
    """Moist-soil relative permittivity (eps', eps'') from the MBSDM.

    Raises FrequencyBandError outside the 300 MHz .. 3 GHz validity band and
    DomainError for invalid moisture. The clay-content regressions use the
    MBSDM default bulk density implicitly; no bulk-density input exists.
    """
    if model not in DIELECTRIC_MODELS:
        raise DomainError(f"unknown dielectric model {model!r}; available: {DIELECTRIC_MODELS}")
    lo, hi = FREQUENCY_BAND_HZ
    if not lo <= profile.frequency_hz <= hi:
        raise FrequencyBandError(
            f"frequency {profile.frequency_hz:.4g} Hz outside MBSDM validity band "
            f"[{lo:.4g}, {hi:.4g}] Hz"
        )

    k = MBSDM_CONSTANTS
    clay_pct = profile.clay_fraction * 100.0
    f = profile.frequency_hz
    eps_inf = k["eps_inf"]

    nd = k["nd"][0] + k["nd"][1] * clay_pct + k["nd"][2] * clay_pct**2
    kd = k["kd"][0] + k["kd"][1] * clay_pct
    mvt = k["mvt"][0] + k["mvt"][1] * clay_pct

    eps0_b = k["eps0_bound"][0] + k["eps0_bound"][1] * clay_pct + k["eps0_bound"][2] * clay_pct**2
    tau_b = k["tau_bound"][0] + k["tau_bound"][1] * clay_pct
    sigma_b = k["sigma_bound"][0] + k["sigma_bound"][1] * clay_pct
    sigma_u = k["sigma_free"][0] + k["sigma_free"][1] * clay_pct

    nb, kb = _refractive_index(*_debye_water(eps0_b, tau_b, sigma_b, f, eps_inf))
    nu, ku = _refractive_index(*_debye_water(k["eps0_free"], k["tau_free"], sigma_u, f, eps_inf))

    mv = profile.vwc
    if mv <= mvt:
        nm = nd + (nb - 1.0) * mv
        km = kd + kb * mv
    else:
        nm = nd + (nb - 1.0) * mvt + (nu - 1.0) * (mv - mvt)
        km = kd + kb * mvt + ku * (mv - mvt)

    return ComplexPermittivity(eps_real=nm * nm - km * km, eps_imag=2.0 * nm * km)


def propagation_constants(eps: ComplexPermittivity, frequency_hz: float) -> PropagationConstants:
    """Plane-wave alpha (Np/m) and beta (rad/m) in a lossy dielectric.

    alpha = w*sqrt((mu*e/2)*(sqrt(1+(e''/e')^2) - 1)),
    beta  = w*sqrt((mu*e/2)*(sqrt(1+(e''/e')^2) + 1)), with e = e0*eps'.
    """
    if eps.eps_real <= 0.0:
        raise DomainError(f"eps_real must be positive: {eps.eps_real}")
    if frequency_hz <= 0.0:
        raise DomainError(f"frequency_hz must be positive: {frequency_hz}")
    w = 2.0 * math.pi * frequency_hz
    ratio = eps.eps_imag / eps.eps_real
    common = VACUUM_PERMEABILITY * VACUUM_PERMITTIVITY * eps.eps_real / 2.0
    root = math.sqrt(1.0 + ratio * ratio)
    alpha = w * math.sqrt(common * (root - 1.0))
    beta = w * math.sqrt(common * (root + 1.0))
    return PropagationConstants(alpha=alpha, beta=beta)

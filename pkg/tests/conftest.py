import numpy as np
import pytest

from sublora.soil import SoilProfile

# Golden values frozen from an independent hand-evaluation of the published
# closed forms (plain-python script, separate from the package code).
GOLDEN = {
    "eps_dry": (2.4043325725063585, 0.10146822945703127),
    "eps_favorable": (3.6397671351625864, 0.2630525216552321),   # vwc=0.05
    "eps_insitu": (6.111548703696624, 0.6041090911378278),       # vwc=0.119
    "eps_wet": (16.80548974742205, 2.202201301854718),           # vwc=0.30
    "alpha_insitu": 2.2200366164862384,
    "beta_insitu": 45.02803752205644,
    "omega_over_c_868": 18.191934790540596,
    "l_ug_insitu_06": 46.607956312364095,
    "l_refr_insitu": 0.8606249558664094,
    "l_air_1m": 31.218177725413213,
    "l_air_20km": 117.23877763869284,
    "l_air_40km": 123.25937755197246,
    "snr_nadir_insitu": -6.557358906923341,
    "snr_edge_insitu": -12.57795882020298,
}


@pytest.fixture
def in_situ_soil():
    return SoilProfile(clay_fraction=0.1686, vwc=0.119, frequency_hz=868e6)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

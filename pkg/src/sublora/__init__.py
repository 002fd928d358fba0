"""Seedable simulator and WET time-allocation optimizer for underground
LoRaWAN devices uplinking through a high-altitude-platform gateway."""

__version__ = "0.1.0"

from .energy import (  # noqa: F401
    ENERGY_NEUTRAL,
    Battery,
    ClassAProfile,
    HarvestConfig,
    LifetimeResult,
    calibrate_overhead,
    consumption_per_period,
    delivery_weighted_consumption,
    energy_per_attempt,
    epp,
    harvested_per_period,
    lifetime,
)
from .linkbudget import (  # noqa: F401
    LinkGeometry,
    RadioConfig,
    air_path_loss,
    received_snr,
    refraction_loss,
    underground_path_loss,
)
from .network import (  # noqa: F401
    IN_SITU_SOIL,
    AttemptBatch,
    PacketAttempt,
    Scenario,
    ScenarioEvaluator,
    SimResult,
    brute_force_oracle,
    generate_traffic,
    place_devices,
    resolve_collisions,
    simulate,
)
from .optimize import EnergyContext, OptimizationResult, optimize_sf_tw, optimize_tw  # noqa: F401
from .phy import (  # noqa: F401
    DemodThresholds,
    LoRaParams,
    REFERENCE_TOA_MS,
    SIR_CAPTURE_DB,
    SNR_THRESHOLD_DB,
    demod_ok,
    time_on_air,
    toa_seconds,
)
from .soil import (  # noqa: F401
    ComplexPermittivity,
    PropagationConstants,
    SoilProfile,
    complex_permittivity,
    propagation_constants,
)

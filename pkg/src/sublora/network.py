"""Monte Carlo uplink engine: placement, traffic, capture-effect collisions.

Randomness is split into named substreams derived from the scenario's two
seeds: stream (geometry_seed, trial, 0) drives placement, (traffic_seed,
trial, 0) start times and (traffic_seed, trial, 1) channel choices. Streams
are counter-based (Philox), so results do not depend on execution order and
trials can be evaluated in parallel or re-evaluated under common random
numbers at a different WET split without disturbing each other. Within a
trial, draws are vectorized in device-index order.

Collision rule: two packets interfere iff they are on the same channel and
their transmission intervals overlap with positive measure (touching
endpoints do not count). A packet survives interference iff its received
power beats the aggregate (or, in "strongest" mode, the strongest single)
interferer power by the capture threshold. Interferers transmit and count
even when their own SNR check failed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ContractViolation, DomainError, ScenarioError
from .linkbudget import LinkGeometry, RadioConfig, air_path_loss, soil_losses_db
from .phy import DEFAULT_THRESHOLDS, DemodThresholds, LoRaParams, toa_seconds
from .soil import SoilProfile

PLACEMENTS = ("disk_uniform", "pipeline_line")
INTERFERENCE_MODES = ("aggregate", "strongest")

#: In-situ sandy-loam soil used by the experiment presets.
IN_SITU_SOIL = SoilProfile(clay_fraction=0.1686, vwc=0.119, frequency_hz=868e6)


@dataclass(frozen=True)
class Scenario:
    """Full experiment descriptor for one simulated deployment."""

    n_devices: int
    report_period_s: float
    wet_duration_s: float
    sf: int
    n_channels: int = 64
    placement: str = "disk_uniform"
    soil: SoilProfile = IN_SITU_SOIL
    burial_depth_m: float = 0.6
    radio: RadioConfig = RadioConfig()
    hap_altitude_m: float = 20e3
    elevation_min_deg: float = 30.0
    lora: LoRaParams | None = None
    toa_source: str = "computed"
    interference: str = "aggregate"
    thresholds: DemodThresholds = DEFAULT_THRESHOLDS
    geometry_seed: int = 1
    traffic_seed: int = 2
    trials: int = 100
    freeze_geometry: bool = False
    dielectric_model: str = "mbsdm"

    def __post_init__(self):
        if self.n_devices < 1:
            raise ScenarioError(f"n_devices must be >= 1: {self.n_devices}")
        if self.n_channels < 1:
            raise ScenarioError(f"n_channels must be >= 1: {self.n_channels}")
        if self.trials < 1:
            raise ScenarioError(f"trials must be >= 1: {self.trials}")
        if self.placement not in PLACEMENTS:
            raise ScenarioError(f"unknown placement {self.placement!r}")
        if self.interference not in INTERFERENCE_MODES:
            raise ScenarioError(f"unknown interference mode {self.interference!r}")
        if self.lora is not None and self.lora.sf != self.sf:
            raise ScenarioError("lora.sf must match scenario.sf")
        # wet_duration_s = 0 means "no WET phase"; the optimizer's search
        # domain includes it, so the zero boundary is accepted here.
        if not 0.0 <= self.wet_duration_s < self.report_period_s:
            raise ScenarioError(
                f"wet_duration_s must lie in [0, report_period_s): {self.wet_duration_s}"
            )
        if self.tx_window_s < self.toa_s:
            raise ScenarioError(
                f"transmission window {self.tx_window_s:.3f} s shorter than "
                f"time-on-air {self.toa_s:.6f} s"
            )
        if not 0.0 < self.elevation_min_deg <= 90.0:
            raise ScenarioError("elevation_min_deg must be in (0, 90]")

    @property
    def lora_params(self) -> LoRaParams:
        return self.lora if self.lora is not None else LoRaParams(sf=self.sf)

    @property
    def toa_s(self) -> float:
        return toa_seconds(self.lora_params, self.toa_source)

    @property
    def tx_window_s(self) -> float:
        return self.report_period_s - self.wet_duration_s

    @property
    def max_ground_distance_m(self) -> float:
        by_elevation = self.hap_altitude_m / math.tan(math.radians(self.elevation_min_deg))
        return min(self.radio.coverage_radius_m, by_elevation)


@dataclass(frozen=True)
class PacketAttempt:
    device_id: int
    start_s: float
    duration_s: float
    channel: int
    rx_power_mw: float
    snr_ok: bool

    def __post_init__(self):
        if self.rx_power_mw <= 0:
            raise DomainError("rx_power_mw must be > 0")
        if self.duration_s <= 0:
            raise DomainError("duration_s must be > 0")


@dataclass
class AttemptBatch:
    """Column-oriented view of one trial's attempts (device-index order)."""

    sf: int
    duration_s: float
    start_s: np.ndarray
    channel: np.ndarray
    rx_power_mw: np.ndarray
    p_rx_dbm: np.ndarray
    snr_ok: np.ndarray

    def __len__(self):
        return self.start_s.shape[0]

    def to_list(self) -> list[PacketAttempt]:
        return [
            PacketAttempt(i, float(self.start_s[i]), self.duration_s,
                          int(self.channel[i]), float(self.rx_power_mw[i]),
                          bool(self.snr_ok[i]))
            for i in range(len(self))
        ]


@dataclass(frozen=True)
class SimResult:
    """Success-probability estimates with a 95% across-trial half-width."""

    p_snr: float
    p_sir: float
    p_s: float
    ci_halfwidth: float
    mean_rx_power_dbm: float
    trials_run: int

    @property
    def p_product(self) -> float:
        """Diagnostic product estimator (independence assumption)."""
        return self.p_snr * self.p_sir


def _rng(seed: int, trial: int, tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, trial, tag))))


def _draw_ground_distances(scenario: Scenario, rng: np.random.Generator) -> np.ndarray:
    """Ground distances (m) to the gateway nadir per the placement law."""
    r_max = scenario.max_ground_distance_m
    u = rng.random(scenario.n_devices)
    if scenario.placement == "disk_uniform":
        return r_max * np.sqrt(u)          # area-uniform: radial CDF ~ r^2
    return np.abs(2.0 * u - 1.0) * r_max   # pipeline_line: uniform on the segment


def place_devices(scenario: Scenario, rng: np.random.Generator) -> list[LinkGeometry]:
    """Independent device geometries respecting the elevation constraint."""
    return [
        LinkGeometry(scenario.burial_depth_m, scenario.hap_altitude_m, float(r))
        for r in _draw_ground_distances(scenario, rng)
    ]


def generate_traffic(scenario: Scenario, geometries, rng: np.random.Generator) -> AttemptBatch:
    """One uplink attempt per device: uniform start in [0, T_t - ToA], uniform channel."""
    ground_r = np.asarray(
        [g.ground_distance_m for g in geometries]
        if geometries and isinstance(geometries[0], LinkGeometry) else geometries,
        dtype=float,
    )
    toa = scenario.toa_s
    window = scenario.tx_window_s - toa
    starts = rng.random(ground_r.shape[0]) * window
    channels = rng.integers(0, scenario.n_channels, size=ground_r.shape[0])
    p_rx, snr_ok = _link_arrays(scenario, ground_r)
    return AttemptBatch(
        sf=scenario.sf, duration_s=toa, start_s=starts, channel=channels,
        rx_power_mw=10.0 ** (p_rx / 10.0), p_rx_dbm=p_rx, snr_ok=snr_ok,
    )


def _link_arrays(scenario: Scenario, ground_r: np.ndarray):
    slant = np.hypot(scenario.hap_altitude_m, ground_r)
    l_ug, l_r = soil_losses_db(scenario.soil, scenario.burial_depth_m,
                               model=scenario.dielectric_model)
    radio = scenario.radio
    p_rx = (radio.tx_power_dbm + radio.tx_gain_dbi + radio.rx_gain_dbi
            - l_ug - l_r
            - air_path_loss(slant, scenario.soil.frequency_hz, radio.path_loss_exponent))
    snr_ok = (p_rx - radio.noise_power_dbm) >= scenario.thresholds.snr_threshold_db[scenario.sf]
    return p_rx, snr_ok


# -- collision resolution -----------------------------------------------------

def _as_columns(attempts):
    if isinstance(attempts, AttemptBatch):
        durations = np.full(len(attempts), attempts.duration_s)
        return attempts.start_s, durations, attempts.channel, attempts.rx_power_mw
    starts = np.array([a.start_s for a in attempts], dtype=float)
    durations = np.array([a.duration_s for a in attempts], dtype=float)
    channels = np.array([a.channel for a in attempts], dtype=np.int64)
    powers = np.array([a.rx_power_mw for a in attempts], dtype=float)
    return starts, durations, channels, powers


def resolve_collisions(attempts, thresholds: DemodThresholds = DEFAULT_THRESHOLDS,
                       mode: str = "aggregate") -> np.ndarray:
    """Per-attempt capture verdicts; True where the packet survives interference.

    All attempts must share one spreading factor (equal durations); inter-SF
    interference is out of scope and raises ContractViolation.
    """
    starts, durations, channels, powers = _as_columns(attempts)
    n = starts.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    tau = float(durations[0])
    if np.any(durations != tau):
        raise ContractViolation("attempts with mixed SFs (unequal durations)")
    if mode not in INTERFERENCE_MODES:
        raise DomainError(f"unknown interference mode {mode!r}")

    order = np.lexsort((starts, channels))
    ok_sorted = _resolve_sorted(starts[order], channels[order], powers[order], tau,
                                10.0 ** (thresholds.sir_capture_db / 10.0), mode)
    ok = np.empty(n, dtype=bool)
    ok[order] = ok_sorted
    return ok


def _resolve_sorted(s, ch, p, tau, gamma_lin, mode):
    """Capture verdicts for attempts sorted by (channel, start)."""
    n = s.shape[0]
    ok = np.ones(n, dtype=bool)
    seg_starts = np.concatenate(([0], np.flatnonzero(np.diff(ch)) + 1, [n]))
    for a, b in zip(seg_starts[:-1], seg_starts[1:]):
        if b - a == 1:
            continue
        ss, pp = s[a:b], p[a:b]
        end = ss + tau
        # overlap(i, j) uses the same float predicates as the oracle:
        # j interferes with i  iff  s_j < s_i + tau  and  s_j + tau > s_i
        lo = np.searchsorted(end, ss, side="right")
        hi = np.searchsorted(ss, end, side="left")
        n_int = hi - lo - 1
        hit = n_int > 0
        if not np.any(hit):
            continue
        if mode == "aggregate":
            csum = np.concatenate(([0.0], np.cumsum(pp)))
            interf = csum[hi] - csum[lo] - pp
        else:
            interf = _window_max_excluding_self(pp, lo, hi)
        ok[a:b] = ~hit | (pp >= gamma_lin * interf)
    return ok


def _window_max_excluding_self(p, lo, hi):
    """Max of p over [lo_i, hi_i) excluding index i, via a sparse table."""
    n = p.shape[0]
    levels = [p]
    length = 1
    while 2 * length <= n:
        prev = levels[-1]
        levels.append(np.maximum(prev[:-length], prev[length:]))
        length *= 2

    def range_max(left, right):
        out = np.zeros(left.shape[0], dtype=float)
        width = right - left
        valid = width > 0
        if not np.any(valid):
            return out
        k = np.zeros_like(width)
        k[valid] = np.frexp(width[valid].astype(float))[1] - 1
        for j in np.unique(k[valid]):
            tbl = levels[j]
            m = valid & (k == j)
            out[m] = np.maximum(tbl[left[m]], tbl[right[m] - (1 << int(j))])
        return out

    idx = np.arange(n)
    return np.maximum(range_max(lo, idx), range_max(idx + 1, hi))


def brute_force_oracle(attempts, thresholds: DemodThresholds = DEFAULT_THRESHOLDS,
                       mode: str = "aggregate") -> np.ndarray:
    """O(n^2) pairwise reference implementation of resolve_collisions."""
    starts, durations, channels, powers = _as_columns(attempts)
    n = starts.shape[0]
    if n > 1000:
        raise DomainError(f"oracle capped at 1000 attempts, got {n}")
    if n and np.any(durations != durations[0]):
        raise ContractViolation("attempts with mixed SFs (unequal durations)")
    gamma_lin = 10.0 ** (thresholds.sir_capture_db / 10.0)
    ok = np.ones(n, dtype=bool)
    for i in range(n):
        s_i, tau_i, c_i, p_i = starts[i], durations[i], channels[i], powers[i]
        total = 0.0
        strongest = 0.0
        count = 0
        for j in range(n):
            if j == i or channels[j] != c_i:
                continue
            if starts[j] < s_i + tau_i and starts[j] + durations[j] > s_i:
                count += 1
                total += powers[j]
                strongest = max(strongest, powers[j])
        if count:
            denom = total if mode == "aggregate" else strongest
            ok[i] = p_i >= gamma_lin * denom
    return ok


# -- trial engine --------------------------------------------------------------

class ScenarioEvaluator:
    """Runs trials for one deployment, reusable across (sf, wet_duration) points.

    Geometry and traffic draws depend only on (seed, trial), never on the
    spreading factor or the WET split, so re-evaluating at a different point
    uses common random numbers: the same devices, the same uniform start
    fractions (rescaled to the window) and the same channel picks.
    """

    def __init__(self, scenario: Scenario, cache: bool = True):
        self.scenario = scenario
        self._cache_enabled = cache
        self._trial_cache: dict[int, tuple] = {}

    def _trial_draws(self, trial: int):
        cached = self._trial_cache.get(trial)
        if cached is not None:
            return cached
        sc = self.scenario
        geom_trial = 0 if sc.freeze_geometry else trial
        ground_r = _draw_ground_distances(sc, _rng(sc.geometry_seed, geom_trial, 0))
        u = _rng(sc.traffic_seed, trial, 0).random(sc.n_devices)
        channels = _rng(sc.traffic_seed, trial, 1).integers(0, sc.n_channels, sc.n_devices)
        slant = np.hypot(sc.hap_altitude_m, ground_r)
        radio = sc.radio
        l_air = air_path_loss(slant, sc.soil.frequency_hz, radio.path_loss_exponent)
        gains = radio.tx_power_dbm + radio.tx_gain_dbi + radio.rx_gain_dbi
        order = np.lexsort((u, channels))
        draws = (
            u[order],
            channels[order],
            (gains - l_air)[order],     # p_rx before soil terms (scalar shift)
            order,
        )
        if self._cache_enabled:
            self._trial_cache[trial] = draws
        return draws

    def evaluate(self, sf: int | None = None, wet_duration_s: float | None = None,
                 trials: int | None = None, on_trial=None) -> SimResult:
        sc = self.scenario
        sf = sc.sf if sf is None else sf
        t_w = sc.wet_duration_s if wet_duration_s is None else wet_duration_s
        n_trials = sc.trials if trials is None else trials

        lora = replace(sc.lora_params, sf=sf)
        toa = toa_seconds(lora, sc.toa_source)
        window = sc.report_period_s - t_w - toa
        if -1e-6 < window < 0.0:   # roundoff at the T_w = T - ToA boundary
            window = 0.0
        if t_w < 0 or window < 0:
            raise ScenarioError(
                f"wet_duration_s {t_w} leaves no room for a {toa:.6f} s frame"
            )
        l_ug, l_r = soil_losses_db(sc.soil, sc.burial_depth_m, model=sc.dielectric_model)
        soil_shift = l_ug + l_r
        snr_floor = (sc.thresholds.snr_threshold_db[sf] + sc.radio.noise_power_dbm
                     + soil_shift)
        gamma_lin = 10.0 ** (sc.thresholds.sir_capture_db / 10.0)

        p_snr_t = np.empty(n_trials)
        p_s_t = np.empty(n_trials)
        sir_num = np.zeros(n_trials)
        sir_den = np.zeros(n_trials)
        rx_sum = 0.0
        for t in range(n_trials):
            u_s, ch_s, praw_s, order = self._trial_draws(t)
            starts = u_s * window
            powers = 10.0 ** ((praw_s - soil_shift) / 10.0)
            snr_ok = praw_s >= snr_floor
            sir_ok = _resolve_sorted(starts, ch_s, powers, toa, gamma_lin,
                                     sc.interference)
            joint = snr_ok & sir_ok
            p_snr_t[t] = snr_ok.mean()
            p_s_t[t] = joint.mean()
            sir_num[t] = joint.sum()
            sir_den[t] = snr_ok.sum()
            rx_sum += float(np.mean(praw_s - soil_shift))
            if on_trial is not None:
                inv = np.empty_like(order)
                inv[order] = np.arange(sc.n_devices)
                batch = AttemptBatch(
                    sf=sf, duration_s=toa, start_s=starts[inv], channel=ch_s[inv],
                    rx_power_mw=powers[inv], p_rx_dbm=(praw_s - soil_shift)[inv],
                    snr_ok=snr_ok[inv],
                )
                on_trial(t, batch, sir_ok[inv])

        with_snr = sir_den > 0
        if np.any(with_snr):
            p_sir = float(np.mean(sir_num[with_snr] / sir_den[with_snr]))
        else:
            p_sir = 0.0
        ci = 0.0
        if n_trials > 1:
            ci = 1.96 * float(np.std(p_s_t, ddof=1)) / math.sqrt(n_trials)
        return SimResult(
            p_snr=float(np.mean(p_snr_t)),
            p_sir=p_sir,
            p_s=float(np.mean(p_s_t)),
            ci_halfwidth=ci,
            mean_rx_power_dbm=rx_sum / n_trials,
            trials_run=n_trials,
        )


def simulate(scenario: Scenario, on_trial=None) -> SimResult:
    """Estimate (P_SNR, P_SIR, P_S) over the scenario's independent trials."""
    return ScenarioEvaluator(scenario, cache=False).evaluate(on_trial=on_trial)

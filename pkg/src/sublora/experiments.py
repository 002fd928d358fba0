"""Experiment presets and CSV persistence.

Every CSV starts with a comment block embedding the artifact version, the
figure kind and the full resolved configuration, so any result file can be
regenerated without external context. Output is byte-stable for a fixed
config and seed. Sweep points run in a process pool when SUBLORA_WORKERS
is set above 1; rows are always written in sweep order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import __version__
from .config import ExperimentConfig
from .energy import (
    ENERGY_NEUTRAL,
    assemble_lifetime,
    calibrate_overhead,
    consumption_per_period,
    delivery_weighted_consumption,
    energy_per_attempt,
    epp,
    harvested_per_period,
    save_profile,
)
from dataclasses import replace
from .errors import ScenarioError
from .network import Scenario, simulate
from .optimize import EnergyContext, optimize_sf_tw
from .phy import REFERENCE_TOA_MS, time_on_air


def _fmt(value) -> str:
    if value is ENERGY_NEUTRAL:
        return "ENERGY_NEUTRAL"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return format(value, ".12g")
    if isinstance(value, list):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def write_csv(path, kind: str, config: ExperimentConfig, columns, rows,
              rejects=()) -> None:
    lines = [f"# sublora {__version__}", f"# figure_kind = {kind}"]
    for key, value in config.resolved_items():
        lines.append(f"# config.{key} = {_fmt(value)}")
    for reject in rejects:
        lines.append(f"# reject = {reject}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        import sys
        sys.stdout.write(text)
        return
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


@dataclass
class PointResult:
    sim: object
    epp_j: float
    lifetime: object
    consumption_phys_j: float
    consumption_eff_j: float
    harvest_j: float


def evaluate_point(scenario: Scenario, ctx: EnergyContext) -> PointResult:
    """Simulate one scenario point and run the full energy accounting."""
    sim = simulate(scenario)
    toa = scenario.toa_s
    e_att = energy_per_attempt(ctx.profile, toa)
    c_phys = consumption_per_period(ctx.profile, toa, scenario.report_period_s)
    life = assemble_lifetime(ctx.profile, ctx.battery, ctx.harvest, toa,
                             scenario.report_period_s, scenario.wet_duration_s,
                             sim.p_s)
    return PointResult(
        sim=sim,
        epp_j=epp(e_att, sim.p_s),
        lifetime=life,
        consumption_phys_j=c_phys,
        consumption_eff_j=delivery_weighted_consumption(c_phys, sim.p_s),
        harvest_j=harvested_per_period(ctx.harvest, scenario.wet_duration_s),
    )


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("SUBLORA_WORKERS", "1")))
    except ValueError:
        return 1


def _map_points(fn, payloads):
    n = _workers()
    if n == 1 or len(payloads) < 2:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, payloads))


# -- preset runners -----------------------------------------------------------

FIG3_COLUMNS = ("depth_m", "vwc", "sf", "p_snr", "p_sir", "p_s", "ci", "epp_j")


def _fig3_point(payload):
    scenario, ctx = payload
    point = evaluate_point(scenario, ctx)
    return (scenario.burial_depth_m, scenario.soil.vwc, scenario.sf,
            point.sim.p_snr, point.sim.p_sir, point.sim.p_s,
            point.sim.ci_halfwidth, point.epp_j)


def run_fig3(config: ExperimentConfig, out_path=None):
    """P_S and EPP versus SF across (burial depth, moisture) conditions."""
    ctx = EnergyContext(config.energy_profile(), config.harvest(), config.battery())
    payloads, rejects = [], []
    index = 0
    for depth in config.list_of("sweep.burial_depth_m"):
        for vwc in config.list_of("sweep.vwc"):
            for sf in config.list_of("sweep.sf"):
                index += 1
                try:
                    payloads.append((config.scenario(
                        index, sf=sf, burial_depth_m=depth, vwc=vwc), ctx))
                except (ScenarioError, ValueError) as exc:
                    rejects.append(f"depth={depth} vwc={vwc} sf={sf}: {exc}")
    rows = _map_points(_fig3_point, payloads)
    write_csv(out_path, "fig3", config, FIG3_COLUMNS, rows, rejects)
    return rows, rejects


FIG4_COLUMNS = ("sf", "t_w_s", "lifetime_years", "p_s", "harvest_j", "consumption_j")


def _fig4_sf_column(payload):
    """All T_w rows for one SF, under common random numbers."""
    config_values, sf, index = payload
    config = ExperimentConfig(config_values)
    ctx = EnergyContext(config.energy_profile(), config.harvest(), config.battery())
    rows, rejects = [], []
    base = None
    evaluator = None
    for t_w in config.list_of("sweep.t_w_s"):
        try:
            scenario = config.scenario(index, sf=sf, wet_duration_s=t_w)
        except (ScenarioError, ValueError) as exc:
            rejects.append(f"sf={sf} t_w={t_w}: {exc}")
            continue
        if evaluator is None:
            from .network import ScenarioEvaluator
            base = scenario
            evaluator = ScenarioEvaluator(base, cache=True)
        sim = evaluator.evaluate(sf=sf, wet_duration_s=t_w)
        life = assemble_lifetime(ctx.profile, ctx.battery, ctx.harvest,
                                 scenario.toa_s, scenario.report_period_s,
                                 t_w, sim.p_s)
        years = ENERGY_NEUTRAL if life.energy_neutral else life.lifetime_years
        rows.append((sf, t_w, years, sim.p_s, life.harvest_per_period_j,
                     life.consumption_per_period_j))
    return rows, rejects


def run_fig4(config: ExperimentConfig, out_path=None):
    """Lifetime versus WET duration, one family of rows per SF."""
    payloads = [(config.values, sf, i)
                for i, sf in enumerate(config.list_of("sweep.sf"))]
    results = _map_points(_fig4_sf_column, payloads)
    rows, rejects = [], []
    for sf_rows, sf_rejects in results:
        rows.extend(sf_rows)
        rejects.extend(sf_rejects)
    write_csv(out_path, "fig4", config, FIG4_COLUMNS, rows, rejects)
    return rows, rejects


FIG5_COLUMNS = ("n", "t_s", "p_r_w", "sf_opt", "t_w_opt", "lifetime_years")


def _fig5_point(payload):
    config_values, n, t, p_r, index = payload
    config = ExperimentConfig(config_values)
    ctx = EnergyContext(config.energy_profile(), config.harvest(p_r),
                        config.battery())
    try:
        scenario = config.scenario(index, n_devices=n, report_period_s=t,
                                   wet_duration_s=0.0)
        result = optimize_sf_tw(scenario, ctx)
    except (ScenarioError, ValueError) as exc:
        return f"n={n} t={t} p_r={p_r}: {exc}"
    years = (ENERGY_NEUTRAL if result.lifetime.energy_neutral
             else result.lifetime.lifetime_years)
    return (n, t, p_r, result.sf, result.t_w_opt_s, years)


def run_fig5(config: ExperimentConfig, out_path=None):
    """Lifetime versus device count with per-point (SF, T_w) re-optimization."""
    payloads = []
    index = 0
    for t in config.list_of("sweep.report_period_s"):
        for p_r in config.list_of("sweep.received_power_w"):
            for n in config.list_of("sweep.n_devices"):
                index += 1
                payloads.append((config.values, int(n), float(t), float(p_r), index))
    outcomes = _map_points(_fig5_point, payloads)
    rows = [o for o in outcomes if isinstance(o, tuple)]
    rejects = [o for o in outcomes if isinstance(o, str)]
    write_csv(out_path, "fig5", config, FIG5_COLUMNS, rows, rejects)
    return rows, rejects


RUN_COLUMNS = ("sf", "t_w_s", "p_snr", "p_sir", "p_s", "p_product", "ci",
               "mean_rx_dbm", "epp_j", "consumption_phys_j", "consumption_eff_j",
               "harvest_j", "net_drain_j", "lifetime_years")


def run_single(config: ExperimentConfig, out_path=None, echo=print):
    """One scenario, full dump."""
    ctx = EnergyContext(config.energy_profile(), config.harvest(), config.battery())
    scenario = config.scenario(0)
    point = evaluate_point(scenario, ctx)
    life = point.lifetime
    years = ENERGY_NEUTRAL if life.energy_neutral else life.lifetime_years
    row = (scenario.sf, scenario.wet_duration_s, point.sim.p_snr, point.sim.p_sir,
           point.sim.p_s, point.sim.p_product, point.sim.ci_halfwidth,
           point.sim.mean_rx_power_dbm, point.epp_j, point.consumption_phys_j,
           point.consumption_eff_j, point.harvest_j, life.net_drain_j, years)
    write_csv(out_path, "run", config, RUN_COLUMNS, [row])
    echo(f"sf={scenario.sf} t_w={scenario.wet_duration_s:g}s "
         f"p_snr={point.sim.p_snr:.4f} p_sir={point.sim.p_sir:.4f} "
         f"p_s={point.sim.p_s:.4f} (+/-{point.sim.ci_halfwidth:.4f}) "
         f"epp={_fmt(point.epp_j)} J lifetime={_fmt(years)}"
         + (" years" if not life.energy_neutral else ""))
    return row


OPT_COLUMNS = ("sf", "t_w_opt_s", "lifetime_years", "winner")


def run_optimize(config: ExperimentConfig, out_path=None, echo=print):
    """Per-SF optimal WET duration and the winning (SF, T_w) pair."""
    ctx = EnergyContext(config.energy_profile(), config.harvest(), config.battery())
    scenario = config.scenario(0)
    result = optimize_sf_tw(scenario, ctx)
    rows = [(sf, t_w, years, "yes" if sf == result.sf else "no")
            for sf, t_w, years in result.per_sf_table]
    write_csv(out_path, "optimize", config, OPT_COLUMNS, rows)
    years = (ENERGY_NEUTRAL if result.lifetime.energy_neutral
             else result.lifetime.lifetime_years)
    echo(f"winner: SF{result.sf} at t_w={result.t_w_opt_s:.1f} s "
         f"lifetime={_fmt(years)}{'' if result.lifetime.energy_neutral else ' years'} "
         f"p_s={result.p_s_at_opt:.4f} ({result.evaluations} evaluations)")
    return result


def run_calibrate(config: ExperimentConfig, out_path, echo=print):
    """Fit the per-period overhead against the configured lifetime anchor."""
    profile = config.energy_profile()
    sf = int(config["calibration.sf"])
    t_w = float(config["calibration.t_w_s"])
    anchor_years = float(config["calibration.anchor_lifetime_years"])
    scenario = config.scenario(0, sf=sf, wet_duration_s=t_w)
    sim = simulate(scenario)
    harvest_j = harvested_per_period(config.harvest(), t_w)
    overhead = calibrate_overhead(
        anchor_years, replace(profile, overhead_energy_j=0.0), config.battery(),
        scenario.toa_s, scenario.report_period_s, harvest_j, sim.p_s)
    fitted = replace(profile, name="calibrated", overhead_energy_j=overhead)
    header = (
        f"fitted against anchor: {anchor_years} years at sf={sf}, t_w={t_w} s\n"
        f"anchor p_s = {sim.p_s!r} (seed {config['run.seed']}, "
        f"trials {scenario.trials}, toa_source {scenario.toa_source})"
    )
    save_profile(fitted, out_path, header=header)
    echo(f"overhead_energy_j = {overhead!r} (anchor p_s {sim.p_s:.6f}) -> {out_path}")
    return overhead


def toa_table(echo=print):
    """Computed versus reference ToA values, CSV on stdout."""
    echo("sf,computed_ms,reference_ms")
    from .phy import LoRaParams
    for sf in range(7, 13):
        computed = time_on_air(LoRaParams(sf=sf)) * 1000.0
        echo(f"{sf},{_fmt(computed)},{_fmt(REFERENCE_TOA_MS[sf])}")

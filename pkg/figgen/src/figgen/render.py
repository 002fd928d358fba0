"""Figure rendering: a pure function of the CSV contents.

Every value drawn comes straight from the table (no recomputation), and
rendering is deterministic: fixed dpi, pinned SVG hash salt, no timestamps in
the output metadata, so re-rendering the same CSV yields identical bytes at a
fixed matplotlib version. ENERGY_NEUTRAL rows are drawn as flagged hollow
markers on a headroom band above the numeric data, never as numbers; the
same treatment applies to unbounded EPP entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "figgen"

import matplotlib.pyplot as plt  # noqa: E402

from .reader import ENERGY_NEUTRAL, ReaderError, ResultTable, read_table  # noqa: E402

KINDS = ("fig3", "fig4", "fig5")
DPI = 120

REQUIRED_COLUMNS = {
    "fig3": ("depth_m", "vwc", "sf", "p_s", "epp_j"),
    "fig4": ("sf", "t_w_s", "lifetime_years", "p_s"),
    "fig5": ("n", "t_s", "p_r_w", "sf_opt", "t_w_opt", "lifetime_years"),
}


class KindMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    kind: str
    out_path: str
    labels: dict = field(default_factory=dict)


@dataclass
class RenderInfo:
    out_path: str
    kind: str
    n_series: int
    n_neutral_markers: int
    series: dict  # label -> (x values, y values) exactly as drawn


def render(spec: FigureSpec) -> RenderInfo:
    """Render one figure from its CSV; returns what was drawn."""
    if spec.kind not in KINDS:
        raise ValueError(f"unknown figure kind {spec.kind!r}; expected one of {KINDS}")
    table = read_table(spec.csv_path)
    if table.kind != spec.kind:
        raise KindMismatchError(
            f"{spec.csv_path} embeds figure_kind = {table.kind!r} "
            f"(config preset {table.config.get('run.seed', '?')!r}-seeded), "
            f"but kind {spec.kind!r} was requested")
    missing = [c for c in REQUIRED_COLUMNS[spec.kind] if c not in table.columns]
    if missing:
        raise ReaderError(f"{spec.csv_path}: missing columns {missing}")

    fig = {"fig3": _render_fig3, "fig4": _render_fig4, "fig5": _render_fig5}[spec.kind]
    figure, info = fig(table, spec.labels)
    meta = {"Date": None} if str(spec.out_path).endswith(".svg") else {"Software": "figgen"}
    figure.savefig(spec.out_path, dpi=DPI, metadata=meta)
    plt.close(figure)
    info.out_path = str(spec.out_path)
    return info


def _group(table: ResultTable, keys):
    idx = [table.columns.index(k) for k in keys]
    groups = {}
    for row in table.rows:
        groups.setdefault(tuple(row[i] for i in idx), []).append(row)
    return groups


def _split_finite(pairs):
    """(x, y) pairs -> finite series plus x positions of flagged values."""
    xs, ys, flagged = [], [], []
    for x, y in pairs:
        if y is ENERGY_NEUTRAL or (isinstance(y, float) and math.isinf(y)):
            flagged.append(x)
        else:
            xs.append(x)
            ys.append(y)
    return xs, ys, flagged


def _flag_band(ax, finite_max):
    return (finite_max if finite_max > 0 else 1.0) * 1.12


def _render_fig3(table: ResultTable, labels):
    c = {name: table.columns.index(name) for name in table.columns}
    groups = _group(table, ("depth_m", "vwc"))
    fig, (ax_ps, ax_epp) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    info = RenderInfo("", "fig3", 0, 0, {})
    finite_epps = [r[c["epp_j"]] for r in table.rows
                   if isinstance(r[c["epp_j"]], float) and math.isfinite(r[c["epp_j"]])]
    band = _flag_band(ax_epp, max(finite_epps, default=1.0))
    for (depth, vwc), rows in sorted(groups.items()):
        rows = sorted(rows, key=lambda r: r[c["sf"]])
        label = f"depth {depth:g} m, vwc {vwc:g}"
        sf = [r[c["sf"]] for r in rows]
        ps = [r[c["p_s"]] for r in rows]
        ax_ps.plot(sf, ps, marker="o", label=label)
        xs, ys, flagged = _split_finite([(r[c["sf"]], r[c["epp_j"]]) for r in rows])
        ax_epp.plot(xs, ys, marker="s", label=label)
        if flagged:
            ax_epp.scatter(flagged, [band] * len(flagged), marker="^",
                           facecolors="none", edgecolors="red", zorder=5)
            info.n_neutral_markers += len(flagged)
        info.n_series += 1
        info.series[label] = (sf, ps)
    ax_ps.set_ylabel(labels.get("ylabel_top", "success probability"))
    ax_epp.set_ylabel(labels.get("ylabel", "energy per delivered packet (J)"))
    ax_epp.set_xlabel(labels.get("xlabel", "spreading factor"))
    if info.n_neutral_markers:
        ax_epp.scatter([], [], marker="^", facecolors="none", edgecolors="red",
                       label="unbounded (no delivery)")
    ax_ps.legend(fontsize=8)
    ax_epp.legend(fontsize=8)
    fig.tight_layout()
    return fig, info


def _render_fig4(table: ResultTable, labels):
    c = {name: table.columns.index(name) for name in table.columns}
    groups = _group(table, ("sf",))
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    info = RenderInfo("", "fig4", 0, 0, {})
    finite = [r[c["lifetime_years"]] for r in table.rows
              if isinstance(r[c["lifetime_years"]], float)]
    band = _flag_band(ax, max((v for v in finite if math.isfinite(v)), default=1.0))
    for (sf,), rows in sorted(groups.items()):
        rows = sorted(rows, key=lambda r: r[c["t_w_s"]])
        label = f"SF{sf:g}"
        xs, ys, flagged = _split_finite(
            [(r[c["t_w_s"]], r[c["lifetime_years"]]) for r in rows])
        line, = ax.plot(xs, ys, marker="o", label=label)
        if ys:
            best = max(range(len(ys)), key=ys.__getitem__)
            ax.plot([xs[best]], [ys[best]], marker="*", markersize=13,
                    color=line.get_color(), linestyle="none")
        if flagged:
            ax.scatter(flagged, [band] * len(flagged), marker="^",
                       facecolors="none", edgecolors=line.get_color(), zorder=5)
            info.n_neutral_markers += len(flagged)
        info.n_series += 1
        info.series[label] = (xs, ys)
    if info.n_neutral_markers:
        ax.scatter([], [], marker="^", facecolors="none", edgecolors="gray",
                   label="energy neutral")
    ax.set_xlabel(labels.get("xlabel", "WET duration (s)"))
    ax.set_ylabel(labels.get("ylabel", "lifetime (years)"))
    ax.legend(fontsize=8, ncols=2)
    fig.tight_layout()
    return fig, info


def _render_fig5(table: ResultTable, labels):
    c = {name: table.columns.index(name) for name in table.columns}
    groups = _group(table, ("t_s", "p_r_w"))
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    info = RenderInfo("", "fig5", 0, 0, {})
    finite = [r[c["lifetime_years"]] for r in table.rows
              if isinstance(r[c["lifetime_years"]], float)]
    band = _flag_band(ax, max((v for v in finite if math.isfinite(v)), default=1.0))
    for (t_s, p_r), rows in sorted(groups.items()):
        rows = sorted(rows, key=lambda r: r[c["n"]])
        label = f"T={t_s:g} s, P_r={p_r:g} W"
        xs, ys, flagged = _split_finite([(r[c["n"]], r[c["lifetime_years"]]) for r in rows])
        line, = ax.plot(xs, ys, marker="o", label=label)
        if flagged:
            ax.scatter(flagged, [band] * len(flagged), marker="^",
                       facecolors="none", edgecolors=line.get_color(), zorder=5)
            info.n_neutral_markers += len(flagged)
        info.n_series += 1
        info.series[label] = (xs, ys)
    if info.n_neutral_markers:
        ax.scatter([], [], marker="^", facecolors="none", edgecolors="gray",
                   label="energy neutral")
    ax.set_xlabel(labels.get("xlabel", "number of devices"))
    ax.set_ylabel(labels.get("ylabel", "lifetime (years)"))
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig, info

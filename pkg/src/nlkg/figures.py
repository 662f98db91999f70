"""Figure rendering for scenario reports.

Every plot is written straight to a PNG next to the delimited output; the
data shown always exists in the CSV/JSON first, figures are a view.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path: Path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def render_decay_figure(series, fit: dict, window, path: Path, title: str) -> str:
    t = np.asarray(series["t"])
    vals = np.asarray(series["u_h1inf"])
    mask = t > 0
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
    ax1.loglog(t[mask], vals[mask], lw=1.2, label=r"$\|u\|_{H^1_\infty}$")
    tw = np.linspace(window[0], window[1], 50)
    ax1.loglog(tw, np.exp(fit["intercept"]) * tw ** fit["slope"], "k--",
               label=f"slope {fit['slope']:.3f}")
    ax1.axvspan(window[0], window[1], color="0.92")
    ax1.set_xlabel("t")
    ax1.legend(fontsize=8)
    ax2.plot(t, series["ratio"], lw=1.2)
    ax2.set_xlabel("t")
    ax2.set_ylabel(r"$(1+t)^{1/2}\,\|u\|_{H^1_\infty}$")
    fig.suptitle(title, fontsize=10)
    return _save(fig, path)


def render_counterexample_figure(series, window, path: Path, title: str) -> str:
    t = np.asarray(series["t"])
    mask = (t >= window[0]) & (t <= window[1])
    r2 = np.sqrt(1.0 + t[mask]) * np.asarray(series["sup_u"])[mask, 1]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
    ax1.semilogx(t[mask], r2, lw=1.2)
    ax1.set_xlabel("t")
    ax1.set_ylabel(r"$(1+t)^{1/2}\,\|u_2\|_\infty$")
    for j, lbl in ((0, "$u_1$"), (1, "$u_2$")):
        ax2.loglog(t[mask], np.asarray(series["sup_u"])[mask, j], lw=1.2, label=lbl)
    ax2.set_xlabel("t")
    ax2.legend(fontsize=8)
    fig.suptitle(title, fontsize=10)
    return _save(fig, path)


def render_rate_figure(record: dict, path: Path, title: str) -> str:
    t = np.asarray(record["t_values"], dtype=float)
    v = np.asarray(record.get("values", record.get("sup_values")), dtype=float)
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.loglog(t, v, "o-", lw=1.0, ms=4)
    w0, w1 = record["window"]
    tw = np.linspace(w0, w1, 50)
    ax.loglog(tw, np.exp(record["intercept"]) * tw ** record["slope"], "k--",
              label=f"slope {record['slope']:.3f}")
    ax.set_xlabel("t")
    ax.legend(fontsize=8)
    ax.set_title(title, fontsize=10)
    return _save(fig, path)


def render_sweep_figure(sweep: dict, path: Path, title: str) -> str:
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.loglog(sweep["eps"], sweep["sup_constants"], "o-")
    ax.set_xlabel(r"data size $\varepsilon$")
    ax.set_ylabel(r"$\sup_t\,(1+t)^{1/2}\|u\|_{H^1_\infty}$")
    ax.set_title(title, fontsize=10)
    return _save(fig, path)


def render_report_figures(report: dict, outdir: Path, scenario,
                          series=None) -> dict:
    """Render whatever the executed checks produced; returns name -> path."""
    outdir = Path(outdir)
    name = report["scenario"]
    paths = {}
    for check in report["checks"]:
        kind = check.get("name")
        if kind == "decay" and series is not None:
            paths["decay"] = render_decay_figure(
                series, check["fit"], check["window"],
                outdir / f"{name}_decay.png", f"{name}: dispersive decay")
            if "sweep" in check:
                paths["sweep"] = render_sweep_figure(
                    check["sweep"], outdir / f"{name}_sweep.png",
                    f"{name}: data-size sweep")
        elif kind == "counterexample-growth" and series is not None:
            paths["growth"] = render_counterexample_figure(
                series, check["window"], outdir / f"{name}_growth.png",
                f"{name}: slow second-component growth")
        elif kind == "decomposition":
            paths["v_rate"] = render_rate_figure(
                check["v_rate"], outdir / f"{name}_v_rate.png",
                "V(t) - 1 remainder rate")
            paths["w_rate"] = render_rate_figure(
                check["w_rate"], outdir / f"{name}_w_rate.png",
                "outside-cone rate")
        elif kind == "lemma3":
            paths["remainder"] = render_rate_figure(
                check["probe"], outdir / f"{name}_remainder.png",
                "cubic main-term remainder rate")
    return paths

"""Figure rendering for the report paths.

Each data-producing command renders a matplotlib figure next to its
delimited output.  Figures are presentation only: nothing downstream
reads them, and the --no-plot flag suppresses them entirely.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["trace_figure", "spectrum_figure", "sweep_figure"]


def trace_figure(trace, report, path) -> None:
    """|C(t)|^2 with measured peaks and predicted time-scale markers."""
    fig, ax = plt.subplots(figsize=(8.0, 4.0))
    ax.plot(trace.times(), trace.values, lw=0.8, color="C0")
    if report is not None:
        if report.peak_list:
            pt = [t for t, _ in report.peak_list]
            ph = [h for _, h in report.peak_list]
            ax.plot(pt, ph, "v", ms=4, color="C3", label="detected peaks")
        t_cl = report.predicted.Tl_cl
        if math.isfinite(t_cl):
            for j in range(1, int(trace.t_max / t_cl) + 1):
                ax.axvline(j * t_cl, color="0.8", lw=0.6, zorder=0)
        t_q = report.predicted.Tl_Q
        if math.isfinite(t_q) and t_q <= trace.t_max:
            ax.axvline(t_q, color="C2", lw=1.0, ls="--",
                       label=r"predicted $T^{(Q)}$")
        ax.legend(loc="upper right", fontsize=8)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$|C(t)|^2$")
    ax.set_ylim(-0.02, 1.05)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def spectrum_figure(spectrum, path) -> None:
    """Quasi-energy versus quantum label, failed entries marked."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ks = [e.k for e in spectrum.entries.values()]
    es = [e.energy for e in spectrum.entries.values()]
    ax.plot(ks, es, "o", ms=4, color="C0", label="quasi-energy")
    if spectrum.failures:
        bad = [spectrum.params.N * m for m in spectrum.failures]
        lo, hi = (min(es), max(es)) if es else (0.0, 1.0)
        ax.vlines(bad, lo, hi, color="C3", lw=0.6, alpha=0.5,
                  label="degenerate branch")
    ax.set_xlabel("k")
    ax.set_ylabel(r"$E_k$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def sweep_figure(rows, axis1, axis2, path) -> None:
    """Modification factors across the sweep grid.

    One axis: |M| versus the swept parameter (log-log when the axis is
    log-spaced).  Two axes: |M_Q| from the closed form as a heat map.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if axis2 is None:
        x = [row[axis1.param] for row in rows]
        for col, style in (("cf_M_cl", "o-"), ("cf_M_Q", "s-"),
                           ("num_M_cl", "x--"), ("num_M_Q", "+--")):
            y = [abs(row[col]) if row[col] is not None else math.nan
                 for row in rows]
            ax.plot(x, y, style, ms=4, lw=0.8, label=col)
        if axis1.spacing == "log":
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(axis1.param)
        ax.set_ylabel("|M|")
        ax.legend(fontsize=8)
    else:
        x1 = sorted({row[axis1.param] for row in rows})
        x2 = sorted({row[axis2.param] for row in rows})
        grid = [[math.nan] * len(x2) for _ in x1]
        for row in rows:
            i = x1.index(row[axis1.param])
            j = x2.index(row[axis2.param])
            val = row["cf_M_Q"]
            grid[i][j] = abs(val) if val is not None else math.nan
        im = ax.imshow(grid, aspect="auto", origin="lower",
                       extent=(min(x2), max(x2), min(x1), max(x1)))
        fig.colorbar(im, ax=ax, label="|M_Q| (closed form)")
        ax.set_xlabel(axis2.param)
        ax.set_ylabel(axis1.param)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

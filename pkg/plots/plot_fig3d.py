#!/usr/bin/env python3
"""Phase diagram: bound-state count over spacing and detuning.

Inputs (from `mwtunnel reproduce fig3d`):
  fig3d_phase_diagram.csv  columns d, omega0, n_boc
  fig3d_bic_curves.csv     embedded-state curves overlaid on the diagram
"""

from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from figcommon import PlotError, STYLE, load_csv, run, save


def render(indir: Path, output: Path) -> None:
    grid = load_csv(
        indir / "fig3d_phase_diagram.csv", ["d", "omega0", "n_boc"]
    )
    curves = load_csv(
        indir / "fig3d_bic_curves.csv", ["n", "d", "omega0_exact", "varpi"]
    )

    d_vals = np.unique(grid["d"])
    w_vals = np.unique(grid["omega0"])
    if len(d_vals) * len(w_vals) != len(grid["d"]):
        raise PlotError("fig3d_phase_diagram.csv is not a complete grid")
    count = np.full((len(d_vals), len(w_vals)), np.nan)
    di = np.searchsorted(d_vals, grid["d"])
    wi = np.searchsorted(w_vals, grid["omega0"])
    count[di, wi] = grid["n_boc"]

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        mesh = ax.pcolormesh(
            w_vals,
            d_vals,
            count,
            cmap="viridis",
            shading="nearest",
            vmin=0,
            vmax=count.max(),
        )
        fig.colorbar(mesh, ax=ax, label="bound states below the band")
        for n in sorted(set(int(v) for v in curves["n"])):
            mask = curves["n"] == n
            order = np.argsort(curves["d"][mask])
            ax.plot(
                curves["omega0_exact"][mask][order],
                curves["d"][mask][order],
                "w--",
                lw=1.0,
            )
            ax.annotate(
                f"n={n}",
                (curves["omega0_exact"][mask][order][-1],
                 curves["d"][mask][order][-1]),
                color="w",
                fontsize=7,
            )
        ax.set_xlim(w_vals.min(), w_vals.max())
        ax.set_ylim(d_vals.min(), d_vals.max())
        ax.set_xlabel(r"$\omega_0/\tilde\omega$")
        ax.set_ylabel(r"$d/\bar z$")
        ax.set_title("bound-state count; dashed: embedded states")
        fig.tight_layout()
        save(fig, output)
        plt.close(fig)


if __name__ == "__main__":
    run(render, __doc__)

#!/usr/bin/env python3
"""Three-site dynamics with bound-state asymptotics.

Inputs (from `mwtunnel reproduce fig4`):
  fig4_trajectory.csv    site amplitudes vs time
  fig4_asymptotic.csv    bound-state residue coefficients
  fig4_bound_states.csv  pole frequencies and weights
"""

from pathlib import Path

import matplotlib.pyplot as plt

from figcommon import (
    BRANCH_COLORS,
    STYLE,
    asymptotic_site_modulus,
    load_csv,
    run,
    save,
)


def render(indir: Path, output: Path) -> None:
    traj = load_csv(
        indir / "fig4_trajectory.csv",
        ["t", "abs_c1", "abs_c2", "abs_c3", "trapped_norm"],
    )
    asym = load_csv(
        indir / "fig4_asymptotic.csv",
        ["varpi", "site", "re_coeff", "im_coeff"],
    )
    states = load_csv(
        indir / "fig4_bound_states.csv", ["branch", "kind", "varpi"]
    )

    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 3, figsize=(10.5, 3.2))
        t = traj["t"]
        for site, ax in zip((1, 2, 3), axes):
            color = BRANCH_COLORS[site - 1]
            ax.plot(
                t[::10], traj[f"abs_c{site}"][::10], ".", ms=2, color=color
            )
            ax.plot(
                t,
                asymptotic_site_modulus(asym, site, t),
                "-",
                color="k",
                lw=0.8,
                alpha=0.7,
            )
            ax.set_xlabel(r"$t\,\tilde\omega$")
            ax.set_ylabel(rf"$|c_{site}(t)|$")
            ax.set_title(f"site {site}")
        poles = ", ".join(
            f"{v:.4f}" for v in sorted(states["varpi"])
        )
        fig.suptitle(
            rf"three sites, poles $\varpi/\tilde\omega$ = {poles}", fontsize=9
        )
        fig.tight_layout()
        save(fig, output)
        plt.close(fig)


if __name__ == "__main__":
    run(render, __doc__)

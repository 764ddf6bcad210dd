#!/usr/bin/env python3
"""Two-site overview: bound-state spectrum and trajectories.

Inputs (from `mwtunnel reproduce fig2`):
  fig2_spectrum.csv                    bound states vs detuning
  fig2_{m002,p006,bic}_trajectory.csv  site amplitudes vs time
  fig2_{m002,p006,bic}_asymptotic.csv  bound-state residue coefficients
"""

from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from figcommon import (
    BRANCH_COLORS,
    STYLE,
    asymptotic_site_modulus,
    load_csv,
    run,
    save,
)

CASES = [
    ("m002", r"$\omega_0 = -0.02\,\tilde\omega$"),
    ("p006", r"$\omega_0 = 0.06\,\tilde\omega$"),
    ("bic", r"$\omega_0 \approx 0.184\,\tilde\omega$ (embedded state)"),
]


def render(indir: Path, output: Path) -> None:
    spectrum = load_csv(
        indir / "fig2_spectrum.csv",
        ["param", "branch", "kind", "varpi", "reZ", "imZ"],
    )
    cases = {}
    for tag, _ in CASES:
        cases[tag] = (
            load_csv(
                indir / f"fig2_{tag}_trajectory.csv",
                ["t", "abs_c1", "abs_c2", "trapped_norm"],
            ),
            load_csv(
                indir / f"fig2_{tag}_asymptotic.csv",
                ["varpi", "site", "re_coeff", "im_coeff"],
            ),
        )

    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 5, figsize=(16, 3.2))

        ax = axes[0]
        for branch in sorted(set(int(b) for b in spectrum["branch"])):
            for kind, marker in (("boc", "."), ("bic", "*")):
                mask = (spectrum["branch"] == branch) & (
                    spectrum["kind"] == kind
                )
                if np.any(mask):
                    ax.plot(
                        spectrum["param"][mask],
                        spectrum["varpi"][mask],
                        marker,
                        ms=8 if kind == "bic" else 3,
                        color=BRANCH_COLORS[branch - 1],
                        label=f"branch {branch} ({kind})",
                    )
        ax.axhline(0.0, color="k", lw=0.6)
        ax.set_xlabel(r"$\omega_0/\tilde\omega$")
        ax.set_ylabel(r"$\varpi/\tilde\omega$")
        ax.set_title("(a) bound states")
        ax.legend(fontsize=6, loc="upper left")

        ax = axes[1]
        for (tag, label), color in zip(CASES, BRANCH_COLORS):
            traj, _ = cases[tag]
            ax.plot(traj["t"], traj["trapped_norm"], color=color, label=label)
        ax.set_xlabel(r"$t\,\tilde\omega$")
        ax.set_ylabel(r"$P(t)$")
        ax.set_title("(b) trapped population")
        ax.set_xlim(0.0, 400.0)
        ax.legend(fontsize=6)

        for k, (tag, label) in enumerate(CASES):
            ax = axes[2 + k]
            traj, asym = cases[tag]
            t = traj["t"]
            for site, color in ((1, BRANCH_COLORS[0]), (2, BRANCH_COLORS[1])):
                ax.plot(
                    t[::5],
                    traj[f"abs_c{site}"][::5],
                    ".",
                    ms=2,
                    color=color,
                    label=f"$|c_{site}|$",
                )
                if len(asym["varpi"]):
                    ax.plot(
                        t,
                        asymptotic_site_modulus(asym, site, t),
                        "-",
                        color=color,
                        alpha=0.7,
                    )
            ax.set_xlabel(r"$t\,\tilde\omega$")
            ax.set_ylabel(r"$|c_j(t)|$")
            ax.set_title(f"({'cde'[k]}) {label}", fontsize=8)
            ax.legend(fontsize=6)

        fig.tight_layout()
        save(fig, output)
        plt.close(fig)


if __name__ == "__main__":
    run(render, __doc__)

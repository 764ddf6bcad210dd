#!/usr/bin/env python3
"""Bound states versus site spacing, with embedded-state curves.

Inputs (from `mwtunnel reproduce fig3`):
  fig3_spectrum.csv    bound states vs spacing at fixed detuning
  fig3_bic_curves.csv  embedded-state loci (exact-match detuning per spacing)
"""

from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from figcommon import BRANCH_COLORS, STYLE, load_csv, run, save


def render(indir: Path, output: Path) -> None:
    spectrum = load_csv(
        indir / "fig3_spectrum.csv",
        ["param", "branch", "kind", "varpi", "reZ", "imZ"],
    )
    curves = load_csv(
        indir / "fig3_bic_curves.csv", ["n", "d", "omega0_exact", "varpi"]
    )

    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))

        for branch in sorted(set(int(b) for b in spectrum["branch"])):
            for kind, marker in (("boc", "."), ("bic", "*")):
                mask = (spectrum["branch"] == branch) & (
                    spectrum["kind"] == kind
                )
                if np.any(mask):
                    ax1.plot(
                        spectrum["param"][mask],
                        spectrum["varpi"][mask],
                        marker,
                        ms=8 if kind == "bic" else 3,
                        color=BRANCH_COLORS[branch - 1],
                        label=f"branch {branch} ({kind})",
                    )
        ax1.axhline(0.0, color="k", lw=0.6)
        ax1.set_xlabel(r"$d/\bar z$")
        ax1.set_ylabel(r"$\varpi/\tilde\omega$")
        ax1.set_title("(a) bound states vs spacing")
        ax1.legend(fontsize=6)

        for n in sorted(set(int(v) for v in curves["n"])):
            mask = curves["n"] == n
            order = np.argsort(curves["d"][mask])
            ax2.plot(
                curves["d"][mask][order],
                curves["omega0_exact"][mask][order],
                "-",
                color=BRANCH_COLORS[(n - 1) % len(BRANCH_COLORS)],
                label=f"n = {n}",
            )
        ax2.set_xlabel(r"$d/\bar z$")
        ax2.set_ylabel(r"$\omega_0/\tilde\omega$")
        ax2.set_ylim(-0.1, 0.6)
        ax2.set_title("(b) embedded-state loci")
        ax2.legend(fontsize=6)

        fig.tight_layout()
        save(fig, output)
        plt.close(fig)


if __name__ == "__main__":
    run(render, __doc__)

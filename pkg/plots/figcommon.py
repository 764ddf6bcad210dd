"""Shared helpers for the figure scripts.

The scripts consume only the CSV files written by the `mwtunnel` command
line tool; no in-process coupling to the simulation package.  Rendering is
deterministic: fixed style, fixed dpi, no timestamps.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

STYLE = {
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
}

BRANCH_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]


class PlotError(RuntimeError):
    """A required CSV is missing, empty, or malformed."""


def load_csv(path: Path, expected_columns: list[str]) -> dict[str, np.ndarray]:
    """Columns of a CSV as float arrays (non-numeric columns as objects)."""
    if not path.is_file():
        raise PlotError(f"missing input file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PlotError(f"empty input file: {path}") from None
        missing = [c for c in expected_columns if c not in header]
        if missing:
            raise PlotError(
                f"{path}: missing column(s) {', '.join(missing)}; "
                f"found {', '.join(header)}"
            )
        rows = list(reader)
    if not rows:
        raise PlotError(f"no data rows in {path}")
    out = {}
    for j, name in enumerate(header):
        col = [row[j] for row in rows]
        try:
            out[name] = np.array([float(v) for v in col])
        except ValueError:
            out[name] = np.array(col, dtype=object)
    return out


def save(fig, output: Path) -> None:
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, metadata={"Software": "mwtunnel-plots"})


def run(render, description: str) -> None:
    """Standard entry point: <script> INPUT_DIR OUTPUT_IMAGE."""
    import argparse

    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("input_dir", type=Path,
                        help="directory with the CSV inputs")
    parser.add_argument("output", type=Path, help="output image path")
    args = parser.parse_args()
    try:
        render(args.input_dir, args.output)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)
    sys.exit(0)


def complex_sum(times: np.ndarray, freqs: np.ndarray,
                coeffs: np.ndarray) -> np.ndarray:
    """|sum_k coeff_k exp(-i w_k t)| for one site."""
    phases = np.exp(-1j * np.outer(times, freqs))
    return np.abs(phases @ coeffs)


def asymptotic_site_modulus(asym: dict[str, np.ndarray], site: int,
                            times: np.ndarray) -> np.ndarray:
    mask = asym["site"] == site
    coeffs = asym["re_coeff"][mask] + 1j * asym["im_coeff"][mask]
    return complex_sum(times, asym["varpi"][mask], coeffs)

"""Tests for the figure scripts.

Run from the plots directory: ``pytest tests``.  These are excluded from
the simulation package's suite; the scripts are exercised through their
command-line interface on small hand-written CSV fixtures.
"""

import csv
import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1]


def write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def run_script(name, indir, output):
    return subprocess.run(
        [sys.executable, str(SCRIPTS / name), str(indir), str(output)],
        capture_output=True,
        text=True,
        cwd=SCRIPTS,
    )


TRAJ_HEADER2 = ["t", "re_c1", "im_c1", "re_c2", "im_c2",
                "abs_c1", "abs_c2", "trapped_norm"]
ASYM_HEADER = ["varpi", "site", "re_coeff", "im_coeff"]


def fake_fig2_inputs(indir):
    write_csv(
        indir / "fig2_spectrum.csv",
        ["param", "branch", "kind", "varpi", "reZ", "imZ"],
        [[-0.02, 1, "boc", -0.059, 0.66, 0], [-0.02, 2, "boc", -0.045, 0.83, 0],
         [0.18, 1, "bic", 0.197, 0.4, 0]],
    )
    traj_rows = [
        [0.1 * k, 0.9, 0.0, 0.1, 0.0, 0.9, 0.1, 0.82] for k in range(50)
    ]
    asym_rows = [[-0.059, 1, 0.33, 0.0], [-0.059, 2, 0.33, 0.0]]
    for tag in ("m002", "p006", "bic"):
        write_csv(indir / f"fig2_{tag}_trajectory.csv", TRAJ_HEADER2, traj_rows)
        write_csv(indir / f"fig2_{tag}_asymptotic.csv", ASYM_HEADER, asym_rows)


def fake_fig3_inputs(indir):
    write_csv(
        indir / "fig3_spectrum.csv",
        ["param", "branch", "kind", "varpi", "reZ", "imZ"],
        [[5.0, 1, "boc", -0.06, 0.6, 0], [6.0, 1, "boc", -0.05, 0.5, 0]],
    )
    write_csv(
        indir / "fig3_bic_curves.csv",
        ["n", "d", "omega0_exact", "varpi"],
        [[1, 5.0, 0.184, 0.197], [1, 6.0, 0.13, 0.137]],
    )


def fake_fig3d_inputs(indir):
    rows = [
        [d, w, int(w < 0.0) + 1 if w < 0.2 else 0]
        for d in (4.0, 5.0, 6.0)
        for w in (-0.05, 0.05, 0.15, 0.25)
    ]
    write_csv(indir / "fig3d_phase_diagram.csv", ["d", "omega0", "n_boc"], rows)
    write_csv(
        indir / "fig3d_bic_curves.csv",
        ["n", "d", "omega0_exact", "varpi"],
        [[1, 4.0, 0.28, 0.3], [1, 5.0, 0.184, 0.197], [1, 6.0, 0.13, 0.137]],
    )


def fake_fig4_inputs(indir):
    header = ["t", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3",
              "abs_c1", "abs_c2", "abs_c3", "trapped_norm"]
    rows = [
        [0.5 * k, 0.5, 0, 0.3, 0, 0.2, 0, 0.5, 0.3, 0.2, 0.38]
        for k in range(40)
    ]
    write_csv(indir / "fig4_trajectory.csv", header, rows)
    write_csv(
        indir / "fig4_asymptotic.csv",
        ASYM_HEADER,
        [[-0.075, s, 0.3, 0.0] for s in (1, 2, 3)],
    )
    write_csv(
        indir / "fig4_bound_states.csv",
        ["branch", "kind", "varpi", "reZ", "imZ"],
        [[1, "boc", -0.075, 0.8, 0], [2, "boc", -0.083, 0.7, 0],
         [3, "boc", -0.068, 0.9, 0]],
    )


FIXTURES = {
    "plot_fig2.py": fake_fig2_inputs,
    "plot_fig3.py": fake_fig3_inputs,
    "plot_fig3d.py": fake_fig3d_inputs,
    "plot_fig4.py": fake_fig4_inputs,
}


@pytest.mark.parametrize("script", sorted(FIXTURES))
def test_renders_without_error(tmp_path, script):
    FIXTURES[script](tmp_path / "in")
    out = tmp_path / "fig.png"
    result = run_script(script, tmp_path / "in", out)
    assert result.returncode == 0, result.stderr
    assert out.is_file() and out.stat().st_size > 0


@pytest.mark.parametrize("script", sorted(FIXTURES))
def test_rendering_is_deterministic(tmp_path, script):
    FIXTURES[script](tmp_path / "in")
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    assert run_script(script, tmp_path / "in", a).returncode == 0
    assert run_script(script, tmp_path / "in", b).returncode == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("script", sorted(FIXTURES))
def test_missing_inputs_fail_with_file_name(tmp_path, script):
    out = tmp_path / "fig.png"
    result = run_script(script, tmp_path / "nothing", out)
    assert result.returncode != 0
    assert "missing input file" in result.stderr
    assert not out.exists()


def test_empty_trajectory_rejected(tmp_path):
    fake_fig4_inputs(tmp_path / "in")
    write_csv(
        tmp_path / "in" / "fig4_trajectory.csv",
        ["t", "abs_c1", "abs_c2", "abs_c3", "trapped_norm"],
        [],
    )
    out = tmp_path / "fig.png"
    result = run_script("plot_fig4.py", tmp_path / "in", out)
    assert result.returncode != 0
    assert "no data rows" in result.stderr
    assert not out.exists()


def test_schema_mismatch_rejected(tmp_path):
    fake_fig3d_inputs(tmp_path / "in")
    write_csv(
        tmp_path / "in" / "fig3d_phase_diagram.csv",
        ["d", "omega0"],
        [[5.0, 0.1]],
    )
    result = run_script("plot_fig3d.py", tmp_path / "in", tmp_path / "f.png")
    assert result.returncode != 0
    assert "missing column" in result.stderr

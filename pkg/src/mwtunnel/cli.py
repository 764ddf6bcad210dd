"""Command-line entry point.

Loads a JSON scenario (same schema as ``LatticeConfig.to_dict``), applies
override flags, dispatches to the spectrum/dynamics/oracle modules, and
writes CSV results with sidecar manifests.  All outputs are deterministic:
repeated runs with the same resolved parameters are byte-identical.

Exit codes: 0 success, 1 scenario/schema error, 2 numerical failure.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from . import dynamics as _dynamics
from . import oracle as _oracle
from . import spectrum as _spectrum
from .kernel import BandEdgeError, BranchCutError, BranchTrackingError
from .model import ConfigError, LatticeConfig, uniform_chain

NUMERICAL_ERRORS = (
    _spectrum.SpectrumError,
    _dynamics.StepSizeError,
    _oracle.DiscretizationError,
    BandEdgeError,
    BranchCutError,
    BranchTrackingError,
    FloatingPointError,
)


def _fmt(x) -> str:
    """Shortest round-tripping decimal form; keeps CSVs byte-stable."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def _write_csv(path: Path, header, rows, manifest: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    sidecar = path.with_name(path.stem + ".manifest.json")
    with open(sidecar, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_run_manifest(outdir: Path, manifest: dict) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "run_manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_config(scenario, n_sites, d, omega0, omega_rabi) -> LatticeConfig:
    """Scenario file merged with override flags; flags win."""
    if scenario is not None:
        try:
            data = json.loads(Path(scenario).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scenario {scenario}: {exc}") from exc
        config = LatticeConfig.from_dict(data)
        if n_sites is not None and n_sites != config.n_sites:
            spacing = config.uniform_spacing
            if spacing is None:
                raise ConfigError(
                    "--n-sites override requires a uniformly spaced scenario"
                )
            config = uniform_chain(
                n_sites, spacing, config.detuning, config.drive, units=config.units
            )
        if d is not None:
            config = config.with_spacing(d)
        if omega0 is not None:
            config = config.with_(detuning=omega0)
        if omega_rabi is not None:
            config = config.with_(drive=omega_rabi)
        return config
    return uniform_chain(
        n_sites if n_sites is not None else 2,
        d if d is not None else 5.0,
        omega0 if omega0 is not None else 0.0,
        omega_rabi if omega_rabi is not None else 0.13,
    )


def _manifest(command: str, config: LatticeConfig, **params) -> dict:
    return {
        "tool": "mwtunnel",
        "version": __version__,
        "command": command,
        "scenario": config.to_dict(),
        "parameters": {k: v for k, v in sorted(params.items())},
    }


def _config_options(fn):
    for opt in reversed(
        [
            click.option("--scenario", type=click.Path(), default=None,
                         help="JSON scenario file (LatticeConfig schema)."),
            click.option("--n-sites", type=int, default=None),
            click.option("--d", type=float, default=None,
                         help="Uniform site spacing, oscillator lengths."),
            click.option("--omega0", type=float, default=None,
                         help="Detuning, trap-frequency units."),
            click.option("--omega-rabi", type=float, default=None,
                         help="Drive strength, trap-frequency units."),
            click.option("--out", type=click.Path(), default=".",
                         help="Output directory."),
        ]
    ):
        fn = opt(fn)
    return fn


def _threshold_options(fn):
    for opt in reversed(
        [
            click.option("--eps-edge", type=float, default=_spectrum.EPS_EDGE,
                         show_default=True,
                         help="Minimum gap below the band edge to report a pole."),
            click.option("--eps-z", type=float, default=_spectrum.EPS_Z,
                         show_default=True,
                         help="Minimum residue weight to report a pole."),
            click.option("--n-max", type=int, default=4, show_default=True,
                         help="Highest embedded-state order searched."),
        ]
    ):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__)
def main():
    """Bound states and non-Markovian tunneling dynamics of a lattice atom."""


def _run(fn):
    """Execute a subcommand body with the documented exit-code mapping."""
    try:
        fn()
    except (ConfigError, ValueError) as exc:
        click.echo(f"scenario error: {exc}", err=True)
        sys.exit(1)
    except NUMERICAL_ERRORS as exc:
        click.echo(f"numerical failure: {type(exc).__name__}: {exc}", err=True)
        sys.exit(2)
    sys.exit(0)


# ---------------------------------------------------------------- spectrum


def _spectrum_rows(scan: _spectrum.SpectrumScan):
    for value, states in zip(scan.grid, scan.states):
        for s in states:
            z = s.residue_weight if s.residue_weight is not None else 0.0
            yield (value, s.branch, s.kind, s.frequency,
                   complex(z).real, complex(z).imag)


@main.command()
@_config_options
@_threshold_options
@click.option("--param", type=click.Choice(["omega0", "d"]), default="omega0",
              show_default=True, help="Swept parameter.")
@click.option("--start", "lo", type=float, required=True)
@click.option("--stop", "hi", type=float, required=True)
@click.option("--points", type=int, default=101, show_default=True)
def spectrum(scenario, n_sites, d, omega0, omega_rabi, out,
             eps_edge, eps_z, n_max, param, lo, hi, points):
    """Bound states along a sweep of the detuning or the spacing."""

    def body():
        config = _resolve_config(scenario, n_sites, d, omega0, omega_rabi)
        grid = np.linspace(lo, hi, points)
        scan = _spectrum.scan_spectrum(
            config, param, grid, n_max=n_max, eps_edge=eps_edge, eps_z=eps_z
        )
        outdir = Path(out)
        manifest = _manifest(
            "spectrum", config, param=param, start=lo, stop=hi, points=points,
            eps_edge=eps_edge, eps_z=eps_z, n_max=n_max,
        )
        _write_csv(
            outdir / "spectrum.csv",
            ["param", "branch", "kind", "varpi", "reZ", "imZ"],
            _spectrum_rows(scan),
            manifest,
        )
        _write_run_manifest(outdir, manifest)
        click.echo(f"wrote {outdir / 'spectrum.csv'}")

    _run(body)


# ---------------------------------------------------------------- dynamics


def _trajectory_rows(traj: _dynamics.AmplitudeTrajectory):
    norm = traj.trapped_norm
    for i, t in enumerate(traj.times):
        c = traj.amplitudes[i]
        row = [t]
        for cj in c:
            row += [cj.real, cj.imag]
        row += list(np.abs(c))
        row.append(norm[i])
        yield row


def _trajectory_header(n: int):
    head = ["t"]
    for j in range(1, n + 1):
        head += [f"re_c{j}", f"im_c{j}"]
    head += [f"abs_c{j}" for j in range(1, n + 1)]
    head.append("trapped_norm")
    return head


def _asymptotic_rows(asym: _dynamics.AsymptoticForm):
    for k, varpi in enumerate(asym.frequencies):
        for j in range(asym.coefficients.shape[1]):
            coeff = asym.coefficients[k, j]
            yield (varpi, j + 1, coeff.real, coeff.imag)


def _write_dynamics(outdir: Path, prefix: str, config, t_max, h, stride,
                    manifest: dict, n_max, eps_edge, eps_z):
    traj = _dynamics.solve_volterra(config, t_max=t_max, h=h)
    if stride > 1:
        traj = _dynamics.AmplitudeTrajectory(
            times=traj.times[::stride],
            amplitudes=traj.amplitudes[::stride],
            config=config,
        )
    asym = _dynamics.asymptotic_form(
        config, n_max=n_max, eps_edge=eps_edge, eps_z=eps_z
    )
    _write_csv(
        outdir / f"{prefix}trajectory.csv",
        _trajectory_header(config.n_sites),
        _trajectory_rows(traj),
        manifest,
    )
    _write_csv(
        outdir / f"{prefix}asymptotic.csv",
        ["varpi", "site", "re_coeff", "im_coeff"],
        _asymptotic_rows(asym),
        manifest,
    )


@main.command()
@_config_options
@_threshold_options
@click.option("--t-max", type=float, default=200.0, show_default=True)
@click.option("--h", type=float, default=0.02, show_default=True,
              help="Integration step, inverse trap frequencies.")
@click.option("--stride", type=int, default=1, show_default=True,
              help="Write every stride-th time step.")
def dynamics(scenario, n_sites, d, omega0, omega_rabi, out,
             eps_edge, eps_z, n_max, t_max, h, stride):
    """Non-Markovian trajectory plus bound-state asymptotics."""

    def body():
        config = _resolve_config(scenario, n_sites, d, omega0, omega_rabi)
        outdir = Path(out)
        manifest = _manifest(
            "dynamics", config, t_max=t_max, h=h, stride=stride,
            eps_edge=eps_edge, eps_z=eps_z, n_max=n_max,
        )
        _write_dynamics(outdir, "", config, t_max, h, stride, manifest,
                        n_max, eps_edge, eps_z)
        _write_run_manifest(outdir, manifest)
        click.echo(f"wrote {outdir / 'trajectory.csv'}")

    _run(body)


# ---------------------------------------------------------------- phase diagram


@main.command("phase-diagram")
@_config_options
@_threshold_options
@click.option("--d-start", type=float, default=2.0, show_default=True)
@click.option("--d-stop", type=float, default=20.0, show_default=True)
@click.option("--d-points", type=int, default=61, show_default=True)
@click.option("--omega0-start", type=float, default=-0.1, show_default=True)
@click.option("--omega0-stop", type=float, default=0.4, show_default=True)
@click.option("--omega0-points", type=int, default=51, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
def phase_diagram_cmd(scenario, n_sites, d, omega0, omega_rabi, out,
                      eps_edge, eps_z, n_max, d_start, d_stop, d_points,
                      omega0_start, omega0_stop, omega0_points, threads):
    """Bound-state count over the (spacing, detuning) plane."""

    def body():
        config = _resolve_config(scenario, n_sites, d, omega0, omega_rabi)
        grid_d = np.linspace(d_start, d_stop, d_points)
        grid_w = np.linspace(omega0_start, omega0_stop, omega0_points)
        diagram = _spectrum.phase_diagram(
            config, grid_d, grid_w, n_max=n_max,
            eps_edge=eps_edge, eps_z=eps_z, threads=threads,
        )
        outdir = Path(out)
        manifest = _manifest(
            "phase-diagram", config,
            d_start=d_start, d_stop=d_stop, d_points=d_points,
            omega0_start=omega0_start, omega0_stop=omega0_stop,
            omega0_points=omega0_points, eps_edge=eps_edge, eps_z=eps_z,
            n_max=n_max, threads=threads,
        )
        _write_csv(
            outdir / "phase_diagram.csv",
            ["d", "omega0", "n_boc"],
            (
                (dv, wv, int(diagram.n_boc[i, j]))
                for i, dv in enumerate(diagram.d_grid)
                for j, wv in enumerate(diagram.omega0_grid)
            ),
            manifest,
        )
        _write_csv(
            outdir / "bic_curves.csv",
            ["n", "d", "omega0_exact", "varpi"],
            (
                (curve["n"], dv, wv, vv)
                for curve in diagram.bic_curves
                for dv, wv, vv in zip(
                    curve["d"], curve["omega0_exact"], curve["varpi"]
                )
            ),
            manifest,
        )
        _write_run_manifest(outdir, manifest)
        click.echo(f"wrote {outdir / 'phase_diagram.csv'}")

    _run(body)


# ---------------------------------------------------------------- bics


@main.command()
@_config_options
@_threshold_options
def bics(scenario, n_sites, d, omega0, omega_rabi, out, eps_edge, eps_z, n_max):
    """Embedded-bound-state candidates of one configuration."""

    def body():
        config = _resolve_config(scenario, n_sites, d, omega0, omega_rabi)
        cands = _spectrum.bic_candidates(config, n_max=n_max)
        outdir = Path(out)
        manifest = _manifest("bics", config, n_max=n_max)
        _write_csv(
            outdir / "bics.csv",
            ["branch", "n", "varpi", "omega0_exact", "residual", "is_match"],
            (
                (c.branch, c.n, c.frequency, c.omega0_exact, c.residual,
                 int(c.is_match))
                for c in cands
            ),
            manifest,
        )
        _write_run_manifest(outdir, manifest)
        for c in cands:
            tag = "MATCH" if c.is_match else "     "
            click.echo(
                f"{tag} branch {c.branch} n={c.n}: varpi={c.frequency:.6f} "
                f"exact at omega0={c.omega0_exact:.6f}"
            )

    _run(body)


# ---------------------------------------------------------------- verify


@main.command()
@_config_options
@click.option("--oracle-l", "oracle_l", type=float, default=400.0,
              show_default=True, help="Box length, oscillator lengths.")
@click.option("--oracle-k", "oracle_k", type=int, default=4096,
              show_default=True, help="Number of discretized band modes.")
@click.option("--t-max", type=float, default=150.0, show_default=True)
@click.option("--h", type=float, default=0.02, show_default=True)
@click.option("--tol-dynamics", type=float, default=2e-3, show_default=True)
@click.option("--tol-spectrum", type=float, default=2e-3, show_default=True)
def verify(scenario, n_sites, d, omega0, omega_rabi, out, oracle_l, oracle_k,
           t_max, h, tol_dynamics, tol_spectrum):
    """Cross-check solver and bound states against exact diagonalization."""

    def body():
        config = _resolve_config(scenario, n_sites, d, omega0, omega_rabi)
        system = _oracle.build(config, box_length=oracle_l, n_modes=oracle_k)
        traj = _dynamics.solve_volterra(config, t_max=t_max, h=h)
        sample = traj.times[:: max(1, int(round(1.0 / h)))]
        exact = _oracle.exact_evolution(system, sample)
        idx = np.round(sample / h).astype(int)
        dyn_dev = float(
            np.max(np.abs(traj.amplitudes[idx] - exact.amplitudes))
        )
        bocs = _spectrum.find_bocs(config)
        below = [e for e, _ in _oracle.bound_state_energies(system) if e < 0.0]
        spec_dev = 0.0
        for s in bocs:
            nearest = min(below, key=lambda e: abs(e - s.frequency), default=None)
            if nearest is None:
                spec_dev = float("inf")
                break
            spec_dev = max(spec_dev, abs(nearest - s.frequency))
        report = {
            "dynamics_max_deviation": dyn_dev,
            "dynamics_tolerance": tol_dynamics,
            "spectrum_max_deviation": spec_dev,
            "spectrum_tolerance": tol_spectrum,
            "n_bocs": len(bocs),
            "pass": dyn_dev <= tol_dynamics and spec_dev <= tol_spectrum,
        }
        outdir = Path(out)
        manifest = _manifest(
            "verify", config, oracle_l=oracle_l, oracle_k=oracle_k,
            t_max=t_max, h=h, tol_dynamics=tol_dynamics,
            tol_spectrum=tol_spectrum,
        )
        manifest["report"] = report
        _write_run_manifest(outdir, manifest)
        click.echo(
            f"dynamics: max |c_volterra - c_exact| = {dyn_dev:.3e} "
            f"(tol {tol_dynamics:g})"
        )
        click.echo(
            f"spectrum: max |varpi - eigenvalue| = {spec_dev:.3e} "
            f"(tol {tol_spectrum:g}) over {len(bocs)} below-band pole(s)"
        )
        if not report["pass"]:
            raise _spectrum.SpectrumError(
                "verification failed; see run_manifest.json"
            )
        click.echo("verify: PASS")

    _run(body)


# ---------------------------------------------------------------- reproduce


#: trajectory parameters of the canned two-site reproduction runs;
#: the embedded-state case runs at the exact-match detuning of the n=1
#: embedded frequency (the printed 0.18 is a rounding of it)
_FIG2_TMAX = 1000.0
_FIG2_H = 0.05
_FIG2_STRIDE = 10


def _reproduce_fig2(outdir: Path) -> None:
    base = uniform_chain(2, 5.0, 0.0, 0.13)
    grid = np.linspace(-0.1, 0.4, 251)
    scan = _spectrum.scan_spectrum(base, "omega0", grid)
    manifest = _manifest(
        "reproduce fig2", base, start=-0.1, stop=0.4, points=251,
        t_max=_FIG2_TMAX, h=_FIG2_H, stride=_FIG2_STRIDE,
    )
    _write_csv(
        outdir / "fig2_spectrum.csv",
        ["param", "branch", "kind", "varpi", "reZ", "imZ"],
        _spectrum_rows(scan),
        manifest,
    )
    bic_omega0 = [
        c.omega0_exact
        for c in _spectrum.bic_candidates(base)
        if c.n == 1
    ][0]
    cases = [("m002", -0.02), ("p006", 0.06), ("bic", bic_omega0)]
    for tag, w in cases:
        config = base.with_(detuning=w)
        _write_dynamics(
            outdir, f"fig2_{tag}_", config, _FIG2_TMAX, _FIG2_H, _FIG2_STRIDE,
            _manifest("reproduce fig2", config, t_max=_FIG2_TMAX, h=_FIG2_H,
                      stride=_FIG2_STRIDE),
            n_max=4, eps_edge=_spectrum.EPS_EDGE, eps_z=_spectrum.EPS_Z,
        )
    _write_run_manifest(outdir, manifest)


def _reproduce_fig3(outdir: Path) -> None:
    base = uniform_chain(2, 5.0, 0.05, 0.13)
    grid = np.linspace(2.0, 20.0, 181)
    scan = _spectrum.scan_spectrum(base, "d", grid)
    manifest = _manifest("reproduce fig3", base, start=2.0, stop=20.0,
                         points=181, param="d")
    _write_csv(
        outdir / "fig3_spectrum.csv",
        ["param", "branch", "kind", "varpi", "reZ", "imZ"],
        _spectrum_rows(scan),
        manifest,
    )
    cands = []
    for dv in grid:
        for c in _spectrum.bic_candidates(base.with_spacing(float(dv))):
            cands.append((c.n, dv, c.omega0_exact, c.frequency))
    _write_csv(
        outdir / "fig3_bic_curves.csv",
        ["n", "d", "omega0_exact", "varpi"],
        cands,
        manifest,
    )
    _write_run_manifest(outdir, manifest)


def _reproduce_fig3d(outdir: Path, threads: int) -> None:
    base = uniform_chain(2, 5.0, 0.0, 0.13)
    grid_d = np.linspace(2.0, 20.0, 61)
    grid_w = np.linspace(-0.1, 0.4, 51)
    diagram = _spectrum.phase_diagram(base, grid_d, grid_w, threads=threads)
    manifest = _manifest(
        "reproduce fig3d", base, d_start=2.0, d_stop=20.0, d_points=61,
        omega0_start=-0.1, omega0_stop=0.4, omega0_points=51, threads=threads,
    )
    _write_csv(
        outdir / "fig3d_phase_diagram.csv",
        ["d", "omega0", "n_boc"],
        (
            (dv, wv, int(diagram.n_boc[i, j]))
            for i, dv in enumerate(diagram.d_grid)
            for j, wv in enumerate(diagram.omega0_grid)
        ),
        manifest,
    )
    _write_csv(
        outdir / "fig3d_bic_curves.csv",
        ["n", "d", "omega0_exact", "varpi"],
        (
            (curve["n"], dv, wv, vv)
            for curve in diagram.bic_curves
            for dv, wv, vv in zip(curve["d"], curve["omega0_exact"], curve["varpi"])
        ),
        manifest,
    )
    _write_run_manifest(outdir, manifest)


def _reproduce_fig4(outdir: Path) -> None:
    config = uniform_chain(3, 5.0, -0.05, 0.13)
    manifest = _manifest("reproduce fig4", config, t_max=2000.0, h=0.05,
                         stride=10)
    _write_dynamics(outdir, "fig4_", config, 2000.0, 0.05, 10, manifest,
                    n_max=4, eps_edge=_spectrum.EPS_EDGE, eps_z=_spectrum.EPS_Z)
    states = _spectrum.all_bound_states(config)
    _write_csv(
        outdir / "fig4_bound_states.csv",
        ["branch", "kind", "varpi", "reZ", "imZ"],
        (
            (s.branch, s.kind, s.frequency,
             complex(s.residue_weight or 0).real,
             complex(s.residue_weight or 0).imag)
            for s in states
        ),
        manifest,
    )
    _write_run_manifest(outdir, manifest)


@main.command()
@click.argument("figure", type=click.Choice(["fig2", "fig3", "fig3d", "fig4"]))
@click.option("--out", type=click.Path(), default=".", help="Output directory.")
@click.option("--threads", type=int, default=1, show_default=True)
def reproduce(figure, out, threads):
    """Write the canned CSV inputs of one figure reproduction."""

    def body():
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        if figure == "fig2":
            _reproduce_fig2(outdir)
        elif figure == "fig3":
            _reproduce_fig3(outdir)
        elif figure == "fig3d":
            _reproduce_fig3d(outdir, threads)
        else:
            _reproduce_fig4(outdir)
        click.echo(f"wrote {figure} CSVs to {outdir}")

    _run(body)


if __name__ == "__main__":
    main()

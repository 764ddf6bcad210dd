"""Bound-state search: poles below the band, embedded bound states, sweeps.

Branch j of the Laplace kernel yields the real pole condition
``Y_j(w) = detuning - R_j(w) = w`` with ``R_j`` the real on-axis branch
value.  Roots below the band edge are BOCs; removable singularities inside
the band that also satisfy the condition are BICs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .kernel import BranchDecomposition
from .model import LatticeConfig

#: reporting threshold: a root closer than this to the band edge is marginal
EPS_EDGE = 1e-4
#: reporting threshold on the residue weight; calibrated so that the
#: one-to-zero boundary of the two-site diagram sits at detuning 0.25
EPS_Z = 0.025
#: matching tolerance for an embedded bound state, trap-frequency units
TOL_BIC = 1e-6
#: bracket expansion hard stop
BRACKET_LIMIT = -1.0e3
#: root certificate required of every reported below-band pole
ROOT_TOL = 1e-10


class SpectrumError(RuntimeError):
    """Root search failed (non-convergence, bad bracket, ...)."""


@dataclass(frozen=True)
class BoundState:
    """One spectral root: below-band (boc) or embedded (bic)."""

    kind: str  # "boc" | "bic"
    branch: int  # 1-based branch index
    frequency: float  # trap-frequency units; boc < 0 < bic
    residue_weight: complex | None = None
    site_amplitudes: np.ndarray | None = None
    n: int | None = None  # embedded-state order, bic only
    residual: float | None = None  # |Y(w) - w| certificate or bic mismatch


@dataclass(frozen=True)
class BicCandidate:
    """An embedded-state frequency and the detuning that would make it exact."""

    branch: int  # 1-based
    n: int
    frequency: float
    omega0_exact: float
    residual: float  # |config detuning - omega0_exact|
    is_match: bool

    def as_bound_state(self) -> BoundState:
        return BoundState(
            kind="bic",
            branch=self.branch,
            frequency=self.frequency,
            n=self.n,
            residual=self.residual,
        )


@dataclass(frozen=True)
class SpectrumScan:
    parameter: str  # "omega0" | "d"
    grid: np.ndarray
    states: tuple[tuple[BoundState, ...], ...]  # per grid point
    config: LatticeConfig

    @property
    def band_edge(self) -> float:
        return 0.0


@dataclass(frozen=True)
class PhaseDiagramGrid:
    d_grid: np.ndarray
    omega0_grid: np.ndarray
    n_boc: np.ndarray  # shape (len(d_grid), len(omega0_grid))
    bic_loci: tuple[tuple[float, float, float, int], ...]  # (d, omega0, w, n)
    bic_curves: tuple[dict, ...]  # per n: {"n", "branch", "d", "omega0_exact", "varpi"}


def _pole_gap(bd: BranchDecomposition, branch: int, varpi: float) -> float:
    """Y_j(varpi) - varpi; strictly decreasing for varpi < 0."""
    r = bd.branch_values_imag_axis(varpi)[branch]
    return bd.config.detuning - r - varpi


def find_bocs(
    config: LatticeConfig,
    eps_edge: float = EPS_EDGE,
    eps_z: float = EPS_Z,
    with_residues: bool = True,
) -> list[BoundState]:
    """Below-band poles of every branch, filtered by the reporting thresholds.

    A root is reported only if it lies at least ``eps_edge`` below the band
    edge and carries residue weight at least ``eps_z``; the band-edge
    divergence of the even branch combinations otherwise produces marginal
    roots of vanishing weight arbitrarily close to the edge.
    """
    bd = BranchDecomposition(config)
    found = []
    for branch in range(config.n_sites):
        hi = -eps_edge
        if _pole_gap(bd, branch, hi) >= 0.0:
            continue  # Y stays above the identity line: no reportable root
        lo = -max(5.0, 4.0 * abs(config.detuning) + 1.0)
        while _pole_gap(bd, branch, lo) <= 0.0:
            lo *= 2.0
            if lo < BRACKET_LIMIT:
                raise SpectrumError(
                    f"branch {branch + 1}: no sign change in [{lo}, {hi}]"
                )
        varpi = brentq(
            lambda w: _pole_gap(bd, branch, w), lo, hi, xtol=1e-14, rtol=8.9e-16
        )
        residual = abs(_pole_gap(bd, branch, varpi))
        if residual > ROOT_TOL:
            raise SpectrumError(
                f"branch {branch + 1}: root certificate failed, |Y - w| = "
                f"{residual:.3e} at w = {varpi}"
            )
        state = BoundState(
            kind="boc", branch=branch + 1, frequency=varpi, residual=residual
        )
        state = _fill_residue(bd, state)
        if state.residue_weight is not None and abs(state.residue_weight) < eps_z:
            continue
        if not with_residues:
            state = replace(state, residue_weight=None, site_amplitudes=None)
        found.append(state)
    return found


def bic_candidates(
    config: LatticeConfig, n_max: int = 4, tol_bic: float = TOL_BIC
) -> list[BicCandidate]:
    """Embedded-state candidates of every branch up to order ``n_max``.

    Each carries the detuning that would make it an exact eigenstate; it is
    an actual embedded bound state of this config when the mismatch is at
    most ``tol_bic``.
    """
    bd = BranchDecomposition(config)
    d = config.uniform_spacing
    cands = []
    if bd.method == "analytic-N2":
        for n in range(1, n_max + 1):
            branch = 0 if n % 2 == 1 else 1
            varpi = 0.5 * (n * math.pi / d) ** 2
            cands.append(_make_candidate(config, bd, branch, n, varpi, tol_bic))
    elif bd.method == "analytic-N3":
        for n in range(2, n_max + 1, 2):
            varpi = (n * math.pi / d) ** 2 / 8.0
            cands.append(_make_candidate(config, bd, 0, n, varpi, tol_bic))
    elif bd.method == "numeric-general":
        cands.extend(_numeric_bic_candidates(config, bd, n_max, tol_bic))
    # analytic-N1: the single branch combination never vanishes
    return [c for c in cands if c is not None]


def _make_candidate(config, bd, branch, n, varpi, tol_bic):
    from .kernel import OMEGA_MAX

    if varpi >= 0.8 * OMEGA_MAX:
        return None
    omega0_exact = varpi + bd.branch_value_on_cut(branch, varpi)
    residual = abs(config.detuning - omega0_exact)
    return BicCandidate(
        branch=branch + 1,
        n=n,
        frequency=varpi,
        omega0_exact=omega0_exact,
        residual=residual,
        is_match=residual <= tol_bic,
    )


def _numeric_bic_candidates(config, bd, n_max, tol_bic):
    """Zero search of the branch eigenvalues of the spectral-density matrix."""
    from .kernel import spectral_density

    omega_hi = 0.8 * 40.0
    grid = np.linspace(1e-3, omega_hi, 4000)

    def branch_eigs(w):
        jmat = spectral_density(config, w)
        vals, _ = bd._diagonalize_real(jmat)
        return vals

    samples = np.array([branch_eigs(w) for w in grid])
    cands = []
    for branch in range(config.n_sites):
        count = 0
        col = samples[:, branch]
        for i in range(len(grid) - 1):
            if col[i] == 0.0 or col[i] * col[i + 1] > 0.0:
                continue
            root = brentq(
                lambda w: branch_eigs(w)[branch], grid[i], grid[i + 1], xtol=1e-14
            )
            count += 1
            if count > n_max:
                break
            cands.append(_make_candidate(config, bd, branch, count, root, tol_bic))
    return cands


def find_bics(
    config: LatticeConfig, n_max: int = 4, tol_bic: float = TOL_BIC
) -> list[BicCandidate]:
    """Alias of :func:`bic_candidates`; see there."""
    return bic_candidates(config, n_max=n_max, tol_bic=tol_bic)


def matching_bics(
    config: LatticeConfig, n_max: int = 4, tol_bic: float = TOL_BIC
) -> list[BoundState]:
    """Embedded bound states actually present in this config."""
    bd = BranchDecomposition(config)
    out = []
    for c in bic_candidates(config, n_max=n_max, tol_bic=tol_bic):
        if c.is_match:
            out.append(_fill_residue(bd, c.as_bound_state()))
    return out


def _fill_residue(bd: BranchDecomposition, state: BoundState) -> BoundState:
    branch = state.branch - 1
    varpi = state.frequency
    try:
        if state.kind == "boc":
            deriv = bd.branch_derivatives_imag_axis(varpi)[branch]
        else:
            deriv = bd.branch_derivative_on_cut(branch, varpi)
        weight = 1.0 / (1.0 + deriv)
        mix = bd.mixing_matrix_imag_axis(varpi)
        amplitudes = mix[:, branch] * weight
    except (ValueError, RuntimeError):
        return state  # derivative evaluation failed; weight left unknown
    return replace(state, residue_weight=complex(weight), site_amplitudes=amplitudes)


def residues(config: LatticeConfig, bound_states: list[BoundState]) -> list[BoundState]:
    """Return the states with residue weight and site amplitudes filled."""
    bd = BranchDecomposition(config)
    return [_fill_residue(bd, s) for s in bound_states]


def all_bound_states(
    config: LatticeConfig,
    n_max: int = 4,
    eps_edge: float = EPS_EDGE,
    eps_z: float = EPS_Z,
    tol_bic: float = TOL_BIC,
) -> list[BoundState]:
    """Reported below-band poles plus matching embedded states, residues filled."""
    states = find_bocs(config, eps_edge=eps_edge, eps_z=eps_z)
    states.extend(matching_bics(config, n_max=n_max, tol_bic=tol_bic))
    return states


def scan_spectrum(
    config: LatticeConfig,
    parameter: str,
    grid,
    n_max: int = 4,
    eps_edge: float = EPS_EDGE,
    eps_z: float = EPS_Z,
    tol_bic: float = TOL_BIC,
) -> SpectrumScan:
    """Bound states along a monotone sweep of the detuning or the spacing."""
    grid = np.asarray(grid, dtype=float)
    steps = np.diff(grid)
    if len(grid) == 0 or (len(grid) > 1 and not (
        np.all(steps > 0) or np.all(steps < 0)
    )):
        raise ValueError("scan grid must be non-empty and strictly monotone")
    states = []
    for value in grid:
        cfg = _configure(config, parameter, value)
        states.append(
            tuple(
                all_bound_states(
                    cfg, n_max=n_max, eps_edge=eps_edge, eps_z=eps_z, tol_bic=tol_bic
                )
            )
        )
    return SpectrumScan(parameter=parameter, grid=grid, states=tuple(states), config=config)


def _configure(config: LatticeConfig, parameter: str, value: float) -> LatticeConfig:
    if parameter == "omega0":
        return config.with_(detuning=float(value))
    if parameter == "d":
        if config.uniform_spacing is None:
            raise ValueError("spacing sweep requires a uniformly spaced chain")
        return config.with_spacing(float(value))
    raise ValueError(f"unknown sweep parameter {parameter!r}")


def phase_diagram(
    config: LatticeConfig,
    d_grid,
    omega0_grid,
    n_max: int = 4,
    eps_edge: float = EPS_EDGE,
    eps_z: float = EPS_Z,
    threads: int = 1,
) -> PhaseDiagramGrid:
    """Count reported below-band poles per (spacing, detuning) cell.

    Embedded-state curves are drawn as the exact-match detuning per spacing
    (they are measure zero in the plane); loci falling inside the detuning
    window are listed separately.
    """
    if config.drive == 0.0:
        raise ValueError(
            "zero drive: all sites are decoupled and every detuning is a "
            "trivial pole; the phase diagram is not defined"
        )
    d_grid = np.asarray(d_grid, dtype=float)
    omega0_grid = np.asarray(omega0_grid, dtype=float)
    jobs = [
        (config, d, omega0_grid, eps_edge, eps_z) for d in d_grid
    ]
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            columns = list(pool.map(_count_column, jobs))
    else:
        columns = [_count_column(job) for job in jobs]
    n_boc = np.array(columns)

    curves = []
    loci = []
    lo, hi = omega0_grid.min(), omega0_grid.max()
    seen = set()
    for d in d_grid:
        cfg = config.with_spacing(float(d))
        for c in bic_candidates(cfg, n_max=n_max):
            key = (c.branch, c.n)
            if key not in seen:
                seen.add(key)
                curves.append(
                    {"n": c.n, "branch": c.branch, "d": [], "omega0_exact": [],
                     "varpi": []}
                )
            curve = next(
                k for k in curves if (k["branch"], k["n"]) == key
            )
            curve["d"].append(float(d))
            curve["omega0_exact"].append(c.omega0_exact)
            curve["varpi"].append(c.frequency)
            if lo <= c.omega0_exact <= hi:
                loci.append((float(d), c.omega0_exact, c.frequency, c.n))
    for curve in curves:
        for key in ("d", "omega0_exact", "varpi"):
            curve[key] = np.asarray(curve[key])
    return PhaseDiagramGrid(
        d_grid=d_grid,
        omega0_grid=omega0_grid,
        n_boc=n_boc,
        bic_loci=tuple(loci),
        bic_curves=tuple(curves),
    )


def _count_column(job) -> list[int]:
    config, d, omega0_grid, eps_edge, eps_z = job
    cfg_d = config.with_spacing(float(d))
    return [
        len(
            find_bocs(
                cfg_d.with_(detuning=float(w)),
                eps_edge=eps_edge,
                eps_z=eps_z,
                with_residues=False,
            )
        )
        for w in omega0_grid
    ]

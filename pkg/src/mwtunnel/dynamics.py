"""Time evolution of the site amplitudes.

Three routes: the full non-Markovian Volterra solution, the memoryless
(Markovian) closed form, and the bound-state residue asymptotics.  The
Volterra solver works in the frame rotating at the detuning and uses
second-order product integration: the memory kernel is integrated exactly
(per-cell Gauss-Legendre moments of the closed form) against a piecewise
linear amplitude, so the step only has to resolve the amplitude, not the
kernel phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernel as _kernel
from . import spectrum as _spectrum
from .kernel import BandEdgeError
from .model import LatticeConfig

#: tolerated overshoot of the trapped norm before the step size is rejected
NORM_TOL = 5e-3

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(12)


class StepSizeError(RuntimeError):
    """Trapped norm exceeded 1 + NORM_TOL; retry with a smaller step."""


@dataclass(frozen=True)
class AmplitudeTrajectory:
    """Uniform time grid with complex site amplitudes."""

    times: np.ndarray  # (n_t,), units of inverse trap frequency
    amplitudes: np.ndarray  # (n_t, N) complex
    config: LatticeConfig | None = None

    @property
    def trapped_norm(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    @property
    def emitted_norm(self) -> np.ndarray:
        return 1.0 - self.trapped_norm

    def tail(self, t_from: float) -> "AmplitudeTrajectory":
        mask = self.times >= t_from
        return AmplitudeTrajectory(
            times=self.times[mask], amplitudes=self.amplitudes[mask], config=self.config
        )


@dataclass(frozen=True)
class AsymptoticForm:
    """Long-time limit: sum of bound-state residue terms."""

    frequencies: np.ndarray  # (n_states,)
    coefficients: np.ndarray  # (n_states, N) complex
    states: tuple = ()

    def evaluate(self, times) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        if len(self.frequencies) == 0:
            return np.zeros(
                times.shape + (self.coefficients.shape[1],), dtype=complex
            )
        phases = np.exp(-1j * np.outer(times, self.frequencies))
        return phases @ self.coefficients

    def trajectory(self, times, config=None) -> AmplitudeTrajectory:
        return AmplitudeTrajectory(
            times=np.asarray(times, float),
            amplitudes=self.evaluate(times),
            config=config,
        )


def _kernel_moments(config: LatticeConfig, h: float, n_steps: int):
    """Per-lag moments of the rotated kernel against the linear hat weights.

    Returns (P, Q), each of shape (n_steps + 1, N, N); index 0 is unused.
    P[l] weighs the older node of cell l, Q[l] the newer one.
    """
    n = config.n_sites
    # quadrature nodes of every cell, flattened
    offsets = 0.5 * h * (_GAUSS_X + 1.0)  # (12,)
    starts = h * np.arange(n_steps)  # (n_cells,)
    sigma = (starts[:, None] + offsets[None, :]).ravel()
    fvals = _kernel.kernel_time(config, sigma).reshape(n_steps, 12, n, n)
    rot = np.exp(1j * config.detuning * sigma).reshape(n_steps, 12)
    g = fvals * rot[:, :, None, None]
    rise = 0.5 * (_GAUSS_X + 1.0)  # (sigma - start)/h at the nodes
    wp = (0.5 * h) * (_GAUSS_W * rise)
    wq = (0.5 * h) * (_GAUSS_W * (1.0 - rise))
    P = np.empty((n_steps + 1, n, n), dtype=complex)
    Q = np.empty((n_steps + 1, n, n), dtype=complex)
    P[0] = Q[0] = np.nan
    np.einsum("cgab,g->cab", g, wp, out=P[1:])
    np.einsum("cgab,g->cab", g, wq, out=Q[1:])
    return P, Q


def solve_volterra(
    config: LatticeConfig, t_max: float = 200.0, h: float = 0.02
) -> AmplitudeTrajectory:
    """Integrate the non-Markovian equation of motion up to ``t_max``.

    Second-order product-trapezoidal scheme; O(n_steps^2) time and
    O(n_steps) memory.  The closed-form kernel is validated against direct
    quadrature once per scenario geometry.
    """
    if h <= 0 or t_max < h:
        raise ValueError("need h > 0 and t_max >= h")
    _kernel.validate_closed_form(config)
    n = config.n_sites
    n_steps = int(round(t_max / h))
    P, Q = _kernel_moments(config, h, n_steps)
    # convolution weight of interior nodes, by lag
    W = np.empty_like(P)
    W[1:-1] = P[1:-1] + Q[2:]
    W[-1] = P[-1]  # never combined with a newer cell

    eye = np.eye(n, dtype=complex)
    step_matrix = np.linalg.inv(eye + 0.5 * h * Q[1])

    u = np.empty((n_steps + 1, n), dtype=complex)
    u[0] = config.initial_amplitudes
    conv_full = np.zeros(n, dtype=complex)  # I_m at the previous node
    norm_cap = 1.0 + NORM_TOL
    for m in range(1, n_steps + 1):
        partial = P[m] @ u[0]
        if m > 1:
            partial += np.einsum("kab,kb->a", W[m - 1 : 0 : -1], u[1:m])
        u[m] = step_matrix @ (u[m - 1] - 0.5 * h * (conv_full + partial))
        if m % 64 == 0 and np.sum(np.abs(u[m]) ** 2) > norm_cap:
            raise StepSizeError(
                f"trapped norm {np.sum(np.abs(u[m])**2):.4f} > {norm_cap} at "
                f"t={m * h:g}; use a smaller step"
            )
        conv_full = partial + Q[1] @ u[m]

    times = h * np.arange(n_steps + 1)
    amplitudes = u * np.exp(-1j * config.detuning * times)[:, None]
    traj = AmplitudeTrajectory(times=times, amplitudes=amplitudes, config=config)
    if traj.trapped_norm.max() > norm_cap:
        raise StepSizeError(
            f"trapped norm peaks at {traj.trapped_norm.max():.4f} > {norm_cap}; "
            "use a smaller step"
        )
    return traj


def markov_solution(config: LatticeConfig, times) -> AmplitudeTrajectory:
    """Memoryless approximation: constant decay matrix plus frequency shift.

    The decay matrix is pi * J(detuning) for positive detuning and zero for
    negative detuning (no band mode is resonant there); the shift is the
    principal-value integral of J over the band.
    """
    times = np.asarray(times, dtype=float)
    n = config.n_sites
    if config.detuning == 0.0:
        raise BandEdgeError(
            "decay rate undefined at zero detuning: the spectral density "
            "diverges at the band edge"
        )
    if config.detuning > 0.0:
        kappa = np.pi * _kernel.spectral_density(config, config.detuning)
    else:
        kappa = np.zeros((n, n))
    delta = -_kernel.laplace_kernel_imag_axis(config, config.detuning)
    generator = -(kappa + 1j * (config.detuning * np.eye(n) + delta))
    evals, evecs = np.linalg.eig(generator)
    weights = np.linalg.solve(evecs, config.initial_amplitudes)
    amplitudes = np.exp(np.outer(times, evals)) * weights[None, :] @ evecs.T
    return AmplitudeTrajectory(times=times, amplitudes=amplitudes, config=config)


def markov_rates(config: LatticeConfig) -> tuple[np.ndarray, np.ndarray]:
    """(decay matrix, shift matrix) entering the memoryless solution."""
    n = config.n_sites
    if config.detuning == 0.0:
        raise BandEdgeError("decay rate undefined at zero detuning")
    if config.detuning > 0.0:
        kappa = np.pi * _kernel.spectral_density(config, config.detuning)
    else:
        kappa = np.zeros((n, n))
    delta = -_kernel.laplace_kernel_imag_axis(config, config.detuning)
    return kappa, delta


def asymptotic_form(
    config: LatticeConfig,
    bound_states=None,
    n_max: int = 4,
    eps_edge: float = _spectrum.EPS_EDGE,
    eps_z: float = _spectrum.EPS_Z,
    tol_bic: float = _spectrum.TOL_BIC,
) -> AsymptoticForm:
    """Residue sum over the bound states; empty when none are present."""
    if bound_states is None:
        bound_states = _spectrum.all_bound_states(
            config, n_max=n_max, eps_edge=eps_edge, eps_z=eps_z, tol_bic=tol_bic
        )
    usable = [s for s in bound_states if s.site_amplitudes is not None]
    if not usable:
        return AsymptoticForm(
            frequencies=np.empty(0),
            coefficients=np.empty((0, config.n_sites), dtype=complex),
        )
    return AsymptoticForm(
        frequencies=np.array([s.frequency for s in usable]),
        coefficients=np.array([s.site_amplitudes for s in usable]),
        states=tuple(usable),
    )


def compare_longtime(
    trajectory: AmplitudeTrajectory, asymptotic: AsymptoticForm, t_tail: float
) -> np.ndarray:
    """Per-site max of | |c_j(t)| - |c_j^inf(t)| | over the tail t >= t_tail."""
    if trajectory.times.max() <= t_tail:
        raise ValueError("trajectory does not reach t_tail")
    tail = trajectory.tail(t_tail)
    ref = asymptotic.evaluate(tail.times)
    return np.max(np.abs(np.abs(tail.amplitudes) - np.abs(ref)), axis=0)


def tail_spectrum(
    trajectory: AmplitudeTrajectory, site: int, t_tail: float
) -> tuple[np.ndarray, np.ndarray]:
    """One-sided amplitude spectrum of |c_site(t)| over the tail.

    Returns (angular frequencies, amplitudes) of the mean-removed modulus;
    useful to read off beat frequencies between bound states.
    """
    tail = trajectory.tail(t_tail)
    sig = np.abs(tail.amplitudes[:, site - 1])
    sig = sig - sig.mean()
    window = np.hanning(len(sig))
    spec = np.abs(np.fft.rfft(sig * window))
    dt = tail.times[1] - tail.times[0]
    freqs = 2.0 * np.pi * np.fft.rfftfreq(len(sig), dt)
    return freqs, spec


def tail_amplitude_at(
    trajectory: AmplitudeTrajectory, site: int, t_tail: float, omega: float
) -> float:
    """Windowed Fourier amplitude of |c_site| at one angular frequency."""
    tail = trajectory.tail(t_tail)
    sig = np.abs(tail.amplitudes[:, site - 1])
    sig = sig - sig.mean()
    window = np.hanning(len(sig))
    phases = np.exp(-1j * omega * tail.times)
    return abs(np.sum(sig * window * phases)) / np.sum(window)

"""Brute-force reference: finite box, discretized band, dense diagonalization.

The matter-wave continuum is replaced by K plane-wave modes in a box of
length L.  Because every +k/-k pair can be rotated into cosine/sine
combinations with real couplings, the Hamiltonian is assembled directly as a
real symmetric matrix (unitarily equivalent to the complex plane-wave form,
with the site block untouched), which keeps the dense diagonalization fast.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .kernel import OMEGA_MAX
from .model import LatticeConfig


class DiscretizationError(ValueError):
    """Box/mode parameters cannot cover the requested band."""


@dataclass(frozen=True)
class DiscretizedSystem:
    """Finite-box stand-in for the site + matter-wave system."""

    config: LatticeConfig
    box_length: float  # L, oscillator lengths
    n_modes: int  # K
    wavenumbers: np.ndarray  # k_n = 2 pi n / L, n in [-K/2, K/2)
    couplings: np.ndarray  # g_{jk}, complex, shape (N, K)

    @property
    def n_sites(self) -> int:
        return self.config.n_sites

    @property
    def size(self) -> int:
        return self.n_sites + self.n_modes

    @cached_property
    def hamiltonian(self) -> np.ndarray:
        """Complex Hermitian matrix in the plane-wave basis."""
        n, k = self.n_sites, self.n_modes
        h = np.zeros((n + k, n + k), dtype=complex)
        np.fill_diagonal(h[:n, :n], self.config.detuning)
        h[n:, n:] = np.diag(0.5 * self.wavenumbers**2)
        h[:n, n:] = self.couplings
        h[n:, :n] = self.couplings.conj().T
        return h

    @cached_property
    def hamiltonian_real(self) -> np.ndarray:
        """Real symmetric matrix in the cosine/sine mode basis.

        Mode order: k = 0, then (cos, sin) pairs for each k > 0, then the
        unpaired most-negative wavenumber (coupling numerically zero).
        """
        n = self.n_sites
        z = np.asarray(self.config.positions)
        kpos = self.wavenumbers[self.wavenumbers > 0]
        amp = _coupling_amplitude(self.config, self.box_length, kpos)
        h = np.zeros((self.size, self.size), dtype=float)
        np.fill_diagonal(h[:n, :n], self.config.detuning)
        # k = 0 mode
        h[n, n] = 0.0
        h[:n, n] = _coupling_amplitude(self.config, self.box_length, np.zeros(1))[0]
        h[n, :n] = h[:n, n]
        # paired modes
        base = n + 1
        for i, k in enumerate(kpos):
            ic, isn = base + 2 * i, base + 2 * i + 1
            h[ic, ic] = h[isn, isn] = 0.5 * k**2
            h[:n, ic] = h[ic, :n] = math.sqrt(2.0) * amp[i] * np.cos(k * z)
            h[:n, isn] = h[isn, :n] = math.sqrt(2.0) * amp[i] * np.sin(k * z)
        # unpaired Nyquist mode
        knyq = self.wavenumbers.min()
        h[-1, -1] = 0.5 * knyq**2
        return h

    @cached_property
    def _eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.hamiltonian_real)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigensystem[0]

    @property
    def recurrence_time(self) -> float:
        """Finite-box revival horizon estimate."""
        omega_typ = max(abs(self.config.detuning), 0.25)
        return self.box_length / (2.0 * math.sqrt(2.0 * omega_typ))


def _coupling_amplitude(
    config: LatticeConfig, box_length: float, k: np.ndarray
) -> np.ndarray:
    return (
        0.5
        * config.drive
        * (4.0 * math.pi) ** 0.25
        / math.sqrt(box_length)
        * np.exp(-0.5 * k**2)
    )


def build(
    config: LatticeConfig, box_length: float = 400.0, n_modes: int = 4096
) -> DiscretizedSystem:
    """Discretize the band; requires an even mode count covering the cutoff."""
    if box_length < 100.0:
        raise DiscretizationError("box length below 100 oscillator lengths")
    if n_modes % 2 != 0:
        raise DiscretizationError("mode count must be even")
    k_max = math.pi * n_modes / box_length
    if 0.5 * k_max**2 <= OMEGA_MAX:
        raise DiscretizationError(
            f"{n_modes} modes in a box of {box_length} only reach "
            f"w = {0.5 * k_max**2:.1f} < cutoff {OMEGA_MAX}"
        )
    n = np.arange(-n_modes // 2, n_modes // 2)
    k = 2.0 * math.pi * n / box_length
    z = np.asarray(config.positions)
    amp = _coupling_amplitude(config, box_length, k)
    couplings = amp[None, :] * np.exp(-1j * np.outer(z, k))
    return DiscretizedSystem(
        config=config,
        box_length=box_length,
        n_modes=n_modes,
        wavenumbers=k,
        couplings=couplings,
    )


def exact_evolution(system: DiscretizedSystem, times) -> "AmplitudeTrajectory":
    """Site amplitudes from the full eigendecomposition."""
    from .dynamics import AmplitudeTrajectory

    times = np.asarray(times, dtype=float)
    if times.max() > system.recurrence_time:
        warnings.warn(
            f"requested t_max {times.max():g} exceeds the estimated recurrence "
            f"time {system.recurrence_time:g}; finite-box revivals may appear",
            stacklevel=2,
        )
    evals, evecs = system._eigensystem
    n = system.n_sites
    psi0 = np.zeros(system.size)
    psi0[system.config.initial_site - 1] = 1.0
    weights = evecs.T @ psi0
    phases = np.exp(-1j * np.outer(times, evals))
    amplitudes = (phases * weights[None, :]) @ evecs[:n].T
    return AmplitudeTrajectory(times=times, amplitudes=amplitudes, config=system.config)


def total_norm(system: DiscretizedSystem, times) -> np.ndarray:
    """Norm over sites plus modes; unity up to rounding for all t."""
    times = np.asarray(times, dtype=float)
    evals, evecs = system._eigensystem
    psi0 = np.zeros(system.size)
    psi0[system.config.initial_site - 1] = 1.0
    weights = evecs.T @ psi0
    phases = np.exp(-1j * np.outer(times, evals))
    full = (phases * weights[None, :]) @ evecs.T
    return np.sum(np.abs(full) ** 2, axis=1)


def bound_state_energies(
    system: DiscretizedSystem, weight_factor: float = 100.0
) -> list[tuple[float, float]]:
    """(energy, site weight) of candidate bound states.

    All below-band eigenvalues are listed; in-band eigenvalues only when
    their site weight exceeds the 1/K delocalized background by
    ``weight_factor`` (a heuristic for the finite box, where an embedded
    bound state hybridizes weakly with its neighbours).
    """
    evals, evecs = system._eigensystem
    n = system.n_sites
    site_weight = np.sum(evecs[:n] ** 2, axis=0)
    out = []
    threshold = weight_factor / system.n_modes
    for e, w in zip(evals, site_weight):
        if e < 0.0 or w > threshold:
            out.append((float(e), float(w)))
    return out


def binned_spectral_density(
    system: DiscretizedSystem, bin_edges: np.ndarray
) -> np.ndarray:
    """Discrete coupling sum binned over mode frequencies, divided by the width.

    Converges to the spectral-density matrix in the continuum limit; the
    oracle's own consistency check.
    """
    edges = np.asarray(bin_edges, dtype=float)
    omega_k = 0.5 * system.wavenumbers**2
    g = system.couplings
    n = system.n_sites
    out = np.zeros((len(edges) - 1, n, n))
    which = np.digitize(omega_k, edges) - 1
    for idx in range(len(edges) - 1):
        mask = which == idx
        block = g[:, mask]
        out[idx] = np.real(block.conj() @ block.T) / (edges[idx + 1] - edges[idx])
    return out

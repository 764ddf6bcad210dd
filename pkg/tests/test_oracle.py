import numpy as np
import pytest

from mwtunnel import spectral_density
from mwtunnel.dynamics import solve_volterra
from mwtunnel.oracle import (
    DiscretizationError,
    binned_spectral_density,
    bound_state_energies,
    build,
    exact_evolution,
    total_norm,
)
from mwtunnel.spectrum import find_bocs

# small but band-covering discretization for fast tests
SMALL = dict(box_length=100.0, n_modes=1024)


class TestBuild:
    def test_parameter_validation(self, two_site):
        cfg = two_site(0.0)
        with pytest.raises(DiscretizationError, match="box length"):
            build(cfg, box_length=50.0)
        with pytest.raises(DiscretizationError, match="even"):
            build(cfg, n_modes=1023)
        with pytest.raises(DiscretizationError, match="cutoff"):
            build(cfg, box_length=400.0, n_modes=256)

    def test_complex_hamiltonian_is_hermitian(self, two_site):
        system = build(two_site(0.05), **SMALL)
        h = system.hamiltonian
        np.testing.assert_allclose(h, h.conj().T)

    def test_real_basis_is_unitarily_equivalent(self, two_site):
        # same spectrum from the plane-wave and the cosine/sine assembly
        system = build(two_site(0.05), **SMALL)
        complex_eigs = np.linalg.eigvalsh(system.hamiltonian)
        real_eigs = np.linalg.eigvalsh(system.hamiltonian_real)
        np.testing.assert_allclose(real_eigs, complex_eigs, atol=1e-12)

    def test_mode_frequencies_cover_band(self, two_site):
        system = build(two_site(0.0), **SMALL)
        omega = 0.5 * system.wavenumbers**2
        assert omega.max() > 40.0


class TestSpectralSum:
    def test_binned_couplings_approach_spectral_density(self, two_site):
        cfg = two_site(0.0)
        system = build(cfg, box_length=400.0, n_modes=4096)
        edges = np.array([0.02, 0.12, 0.5, 1.0, 1.5, 2.5])
        binned = binned_spectral_density(system, edges)
        from scipy.integrate import quad

        for i in range(len(edges) - 1):
            # the discrete coupling sum approximates the bin average of J
            target = np.array(
                [
                    [
                        quad(
                            lambda w: spectral_density(cfg, w)[a, b],
                            edges[i],
                            edges[i + 1],
                        )[0]
                        / (edges[i + 1] - edges[i])
                        for b in range(2)
                    ]
                    for a in range(2)
                ]
            )
            scale = np.abs(target).max()
            np.testing.assert_allclose(
                binned[i], target, atol=0.05 * scale
            )


class TestEvolution:
    def test_total_norm_conserved(self, two_site):
        system = build(two_site(0.05), **SMALL)
        np.testing.assert_allclose(
            total_norm(system, [0.0, 10.0, 40.0]), 1.0, atol=1e-10
        )

    def test_initial_state(self, three_site):
        system = build(three_site(0.0, initial_site=2), **SMALL)
        traj = exact_evolution(system, [0.0])
        np.testing.assert_allclose(
            traj.amplitudes[0], [0.0, 1.0, 0.0], atol=1e-14
        )

    def test_matches_volterra_short_horizon(self, two_site):
        cfg = two_site(-0.02)
        system = build(cfg, **SMALL)
        times = np.arange(0.0, 30.0 + 1e-9, 0.5)
        exact = exact_evolution(system, times)
        volterra = solve_volterra(cfg, t_max=30.0, h=0.01)
        idx = np.round(times / 0.01).astype(int)
        assert np.abs(volterra.amplitudes[idx] - exact.amplitudes).max() < 2e-3

    def test_recurrence_warning(self, two_site):
        system = build(two_site(0.05), **SMALL)
        with pytest.warns(UserWarning, match="recurrence"):
            exact_evolution(system, [0.0, 10.0 * system.recurrence_time])


class TestBoundStates:
    def test_below_band_eigenvalues_match_pole_search(self, two_site):
        cfg = two_site(-0.02)
        system = build(cfg, **SMALL)
        below = sorted(e for e, _ in bound_state_energies(system) if e < 0.0)
        poles = sorted(s.frequency for s in find_bocs(cfg))
        assert len(below) == len(poles)
        np.testing.assert_allclose(below, poles, atol=2e-3)

    def test_bound_states_localized(self, two_site):
        system = build(two_site(-0.02), **SMALL)
        for energy, weight in bound_state_energies(system):
            if energy < 0.0:
                assert weight > 0.5

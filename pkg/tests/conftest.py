"""Shared fixtures and independent reference implementations.

The reference helpers here deliberately avoid the package's internal code
paths (different integration variables, different schemes) so that
agreement is evidence, not tautology.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from mwtunnel import uniform_chain

#: standard two-site scenario used throughout: spacing 5, drive 0.13
TWO_SITE = dict(n_sites=2, spacing=5.0, drive=0.13)


@pytest.fixture
def two_site():
    def make(detuning):
        return uniform_chain(2, 5.0, detuning, 0.13)

    return make


@pytest.fixture
def three_site():
    def make(detuning, initial_site=1):
        return uniform_chain(3, 5.0, detuning, 0.13, initial_site=initial_site)

    return make


def ref_spectral_density(drive, separation, omega):
    """Direct formula in the band variable, no substitutions."""
    return (
        drive**2
        * math.exp(-2.0 * omega)
        / math.sqrt(8.0 * math.pi * omega)
        * math.cos(math.sqrt(2.0 * omega) * separation)
    )


def ref_level_shift(drive, separation, varpi, omega_max=60.0):
    """Integral of J(w)/(w - varpi) over the band, in the band variable.

    For varpi < 0 this is an ordinary integral; for varpi > 0 the principal
    value is taken by symmetric subtraction around the pole.  Both paths are
    coded independently of the package (which substitutes w = x^2/2).
    """

    def num(w):
        return ref_spectral_density(drive, separation, w)

    if varpi < 0.0:
        val = 0.0
        for a, b in [(0.0, 1.0), (1.0, omega_max)]:
            val += quad(
                lambda w: num(w) / (w - varpi), a, b,
                epsabs=1e-13, epsrel=1e-12, limit=300,
            )[0]
        return val
    delta = min(0.5 * varpi, 1.0)
    # symmetric window: J(w)/(w-varpi) + analytic cancellation of the pole
    sym = quad(
        lambda u: (num(varpi + u) - num(varpi - u)) / u,
        0.0, delta, epsabs=1e-13, epsrel=1e-12, limit=300,
    )[0]
    val = sym
    for a, b in [(0.0, varpi - delta), (varpi + delta, omega_max)]:
        if b > a:
            val += quad(
                lambda w: num(w) / (w - varpi), a, b,
                epsabs=1e-13, epsrel=1e-12, limit=300,
                points=[a] if a < 1e-6 else None,
            )[0]
    return val


def ref_kernel_time(drive, separation, t):
    """Memory kernel by direct oscillatory quadrature over the band."""
    re = quad(
        lambda w: ref_spectral_density(drive, separation, w) * math.cos(w * t),
        0.0, 60.0, epsabs=1e-12, epsrel=1e-11, limit=2000,
    )[0]
    im = quad(
        lambda w: ref_spectral_density(drive, separation, w) * math.sin(w * t),
        0.0, 60.0, epsabs=1e-12, epsrel=1e-11, limit=2000,
    )[0]
    return re - 1j * im


def dominant_tail_frequencies(trajectory, site, t_tail, n_peaks=3):
    """Frequencies of the strongest spectral peaks of |c_site| over the tail."""
    from mwtunnel.dynamics import tail_spectrum

    freqs, spec = tail_spectrum(trajectory, site, t_tail)
    spec = spec.copy()
    spec[0] = 0.0
    peaks = []
    for _ in range(n_peaks):
        i = int(np.argmax(spec))
        peaks.append(freqs[i])
        lo = max(0, i - 3)
        spec[lo : i + 4] = 0.0
    return peaks

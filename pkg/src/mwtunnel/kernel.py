"""Spectral density, memory kernel and its Laplace-domain branch structure.

All integrals over the matter-wave band use the substitution w = x^2/2,
which turns the inverse-square-root band-edge singularity of the spectral
density into a smooth Gaussian integrand in x.  Integrals are truncated at
OMEGA_MAX where the Gaussian weight is < 1e-34.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad
from scipy.optimize import linear_sum_assignment

from .model import LatticeConfig

#: Frequency cutoff (trap units) of all band integrals.
OMEGA_MAX = 40.0
#: Corresponding cutoff of the substituted variable x = sqrt(2 w).
X_MAX = math.sqrt(2.0 * OMEGA_MAX)

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-12, limit=400)


class BranchCutError(ValueError):
    """Evaluation requested on the Laplace-domain branch cut."""


class BandEdgeError(ValueError):
    """Evaluation requested exactly at the band edge w = 0."""


class BranchTrackingError(RuntimeError):
    """Branch labels could not be continued unambiguously."""

    def __init__(self, message: str, gap: float):
        super().__init__(f"{message} (degeneracy gap {gap:.3e})")
        self.gap = gap


def _prefactor(drive: float) -> float:
    # J(w) dw expressed in x: prefactor * exp(-x^2) * cos(d x) dx
    return drive**2 / math.sqrt(4.0 * math.pi)


def _unique_separations(config: LatticeConfig) -> tuple[np.ndarray, np.ndarray]:
    """Unique pairwise separations and the index matrix mapping them back."""
    seps = config.separations()
    vals, inv = np.unique(np.round(seps, 12), return_inverse=True)
    return vals, inv.reshape(seps.shape)


def _assemble(values: np.ndarray, index: np.ndarray) -> np.ndarray:
    return np.asarray(values)[index]


def spectral_density(config: LatticeConfig, omega: float) -> np.ndarray:
    """Correlated spectral-density matrix J(w), real symmetric, for w > 0."""
    if omega <= 0:
        raise BandEdgeError(f"spectral density requires w > 0, got {omega}")
    seps = config.separations()
    amp = config.drive**2 * math.exp(-2.0 * omega) / math.sqrt(8.0 * math.pi * omega)
    return amp * np.cos(math.sqrt(2.0 * omega) * seps)


def kernel_time(config: LatticeConfig, t: float | np.ndarray) -> np.ndarray:
    """Memory-kernel matrix f(t) from the closed form.

    Vectorized over t: an array argument returns shape (len(t), N, N).
    """
    t = np.asarray(t, dtype=float)
    seps = config.separations()
    a = 1.0 + 0.5j * t
    scalar = a.ndim == 0
    a = np.atleast_1d(a)[:, None, None]
    out = (config.drive**2 / 4.0) / np.sqrt(a) * np.exp(-(seps**2) / (4.0 * a))
    return out[0] if scalar else out


def kernel_time_quadrature(config: LatticeConfig, t: float) -> np.ndarray:
    """Direct quadrature of the Fourier transform of J; validation oracle."""
    pref = _prefactor(config.drive)
    vals, index = _unique_separations(config)
    out = []
    for d in vals:
        f = quad(
            lambda x: pref * math.exp(-(x**2)) * math.cos(d * x)
            * np.exp(-0.5j * x**2 * t),
            0.0,
            X_MAX,
            complex_func=True,
            **_QUAD_OPTS,
        )[0]
        out.append(f)
    return _assemble(np.array(out), index)


_validated_kernels: set[tuple] = set()


def validate_closed_form(config: LatticeConfig, tol: float = 1e-8) -> None:
    """One-time check of the closed-form kernel against direct quadrature.

    Cached per (drive, separations); raises if the forms disagree.
    """
    key = (config.drive,) + tuple(np.unique(np.round(config.separations(), 12)))
    if key in _validated_kernels:
        return
    for t in (0.0, 1.0, 10.0, 100.0):
        err = np.abs(kernel_time(config, t) - kernel_time_quadrature(config, t)).max()
        if err > tol:
            raise RuntimeError(
                f"closed-form kernel disagrees with quadrature at t={t}: {err:.3e}"
            )
    _validated_kernels.add(key)


def _on_branch_cut(s: complex) -> bool:
    return abs(s.real) < 1e-14 and s.imag < 0


def laplace_kernel(config: LatticeConfig, s: complex) -> np.ndarray:
    """Laplace-domain kernel matrix, adaptive quadrature, off the cut."""
    s = complex(s)
    if _on_branch_cut(s):
        raise BranchCutError(
            f"s={s} lies on the branch cut; use laplace_kernel_imag_axis for the "
            "principal-value evaluation"
        )
    pref = _prefactor(config.drive)
    vals, index = _unique_separations(config)
    out = []
    for d in vals:
        v = quad(
            lambda x: pref * math.exp(-(x**2)) * math.cos(d * x) / (s + 0.5j * x**2),
            0.0,
            X_MAX,
            complex_func=True,
            **_QUAD_OPTS,
        )[0]
        out.append(v)
    return _assemble(np.array(out), index)


def _pv_radial(pref: float, d: float, varpi: float) -> float:
    """r_d = int J_d(w)/(w - varpi) dw for real varpi (principal value on the cut)."""
    if varpi == 0.0:
        raise BandEdgeError("kernel integral undefined exactly at the band edge")
    if varpi < 0.0:
        return quad(
            lambda x: 2.0 * pref * math.exp(-(x**2)) * math.cos(d * x)
            / (x**2 - 2.0 * varpi),
            0.0,
            X_MAX,
            **_QUAD_OPTS,
        )[0]
    if varpi >= 0.81 * OMEGA_MAX:
        raise ValueError(f"on-cut evaluation supported only below w={0.81 * OMEGA_MAX}")
    xb = math.sqrt(2.0 * varpi)

    def h(x):
        # residual factor after splitting off the simple pole at x = xb
        return 2.0 * pref * math.exp(-(x**2)) * math.cos(d * x) / (x + xb)

    b = xb + min(1.0, xb)
    pv = quad(h, 0.0, b, weight="cauchy", wvar=xb, **_QUAD_OPTS)[0]
    if b < X_MAX:
        pv += quad(lambda x: h(x) / (x - xb), b, X_MAX, **_QUAD_OPTS)[0]
    return pv


def laplace_kernel_imag_axis(config: LatticeConfig, varpi: float) -> np.ndarray:
    """Real matrix R(varpi) with f~(-i varpi) = -i R(varpi).

    For varpi < 0 this is the ordinary (convergent) integral; for varpi > 0
    the principal value across the cut.
    """
    pref = _prefactor(config.drive)
    vals, index = _unique_separations(config)
    return _assemble(
        np.array([_pv_radial(pref, d, varpi) for d in vals]), index
    )


def laplace_kernel_derivative(config: LatticeConfig, s: complex) -> np.ndarray:
    """Entrywise d/ds of the Laplace-domain kernel, off the cut."""
    s = complex(s)
    if _on_branch_cut(s):
        raise BranchCutError(f"s={s} lies on the branch cut")
    pref = _prefactor(config.drive)
    vals, index = _unique_separations(config)
    out = []
    for d in vals:
        v = quad(
            lambda x: -pref * math.exp(-(x**2)) * math.cos(d * x)
            / (s + 0.5j * x**2) ** 2,
            0.0,
            X_MAX,
            complex_func=True,
            **_QUAD_OPTS,
        )[0]
        out.append(v)
    return _assemble(np.array(out), index)


def laplace_kernel_derivative_imag_axis(
    config: LatticeConfig, varpi: float
) -> np.ndarray:
    """Real matrix Q(varpi) = int J(w)/(w - varpi)^2 dw, requires varpi < 0.

    Equals d/ds of the Laplace kernel at s = -i varpi (which is real there).
    """
    if varpi >= 0.0:
        raise BranchCutError(
            "entrywise kernel derivative diverges on the cut; use the branch "
            "combination instead"
        )
    pref = _prefactor(config.drive)
    vals, index = _unique_separations(config)
    out = [
        quad(
            lambda x: 4.0 * pref * math.exp(-(x**2)) * math.cos(d * x)
            / (x**2 - 2.0 * varpi) ** 2,
            0.0,
            X_MAX,
            **_QUAD_OPTS,
        )[0]
        for d in vals
    ]
    return _assemble(np.array(out), index)


@dataclass(frozen=True)
class BranchEvaluation:
    """Branch decomposition of the Laplace kernel at one point s."""

    s: complex
    values: np.ndarray  # D_j(s), shape (N,)
    vectors: np.ndarray  # V_s, columns are branch vectors
    mixing: np.ndarray  # M = V_s diag(V_s^-1 c0)


class BranchDecomposition:
    """Branch functions D_j(s) of the Laplace-domain kernel matrix.

    Uniformly spaced chains with N <= 3 use the analytic forms; any other
    geometry falls back to a dense complex eigendecomposition with branch
    labels continued by eigenvector overlap against a reference point.
    """

    #: reference point used to fix the branch order in the numeric path
    S_REF = 1.0 + 0.0j

    def __init__(self, config: LatticeConfig):
        self.config = config
        self.n = config.n_sites
        d = config.uniform_spacing
        if self.n == 1:
            self.method = "analytic-N1"
        elif d is not None and self.n == 2:
            self.method = "analytic-N2"
        elif d is not None and self.n == 3:
            self.method = "analytic-N3"
        else:
            self.method = "numeric-general"
        self._spacing = d

    # ---- analytic branch combinations -------------------------------------

    def linear_combination(self, branch: int) -> list[tuple[float, float]] | None:
        """Branch spectral combination as [(separation, coefficient), ...].

        Only branches that are s-independent linear combinations of the
        radial kernel components have one; others return None.
        """
        d = self._spacing
        if self.method == "analytic-N1":
            return [(0.0, 1.0)]
        if self.method == "analytic-N2":
            return [(0.0, 1.0), (d, 1.0)] if branch == 0 else [(0.0, 1.0), (d, -1.0)]
        if self.method == "analytic-N3" and branch == 0:
            return [(0.0, 1.0), (2.0 * d, -1.0)]
        return None

    def combination_x(self, branch: int, x: np.ndarray) -> np.ndarray:
        """Cosine combination C_j(x) of the branch, in the substituted variable."""
        combo = self.linear_combination(branch)
        if combo is None:
            raise ValueError(f"branch {branch + 1} is not a fixed linear combination")
        x = np.asarray(x, dtype=float)
        return sum(a * np.cos(d * x) for d, a in combo)

    # ---- generic evaluation ------------------------------------------------

    def _radial_values(self, s: complex) -> np.ndarray:
        mat = laplace_kernel(self.config, s)
        return self._radial_from_matrix(mat)

    def _radial_from_matrix(self, mat: np.ndarray) -> np.ndarray:
        # components f_0, f_1, ..., valid for uniform chains
        return mat[0, : self.n]

    def branch_values(self, s: complex) -> np.ndarray:
        return self.decompose(s).values

    def decompose(self, s: complex) -> BranchEvaluation:
        mat = laplace_kernel(self.config, s)
        values, vectors = self._diagonalize(mat)
        return BranchEvaluation(
            s=complex(s),
            values=values,
            vectors=vectors,
            mixing=mixing_from_vectors(vectors, self.config.initial_amplitudes),
        )

    def _diagonalize(self, mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.method == "analytic-N1":
            return mat[0, :1].copy(), np.ones((1, 1), dtype=complex)
        if self.method == "analytic-N2":
            f0, f1 = mat[0, 0], mat[0, 1]
            values = np.array([f0 + f1, f0 - f1])
            vectors = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex)
            return values, vectors
        if self.method == "analytic-N3":
            f0, f1, f2 = mat[0, 0], mat[0, 1], mat[0, 2]
            e = np.sqrt(8.0 * f1**2 + f2**2 + 0j)
            values = np.array(
                [f0 - f2, f0 + 0.5 * (f2 - e), f0 + 0.5 * (f2 + e)]
            )
            with np.errstate(divide="ignore", invalid="ignore"):
                vectors = np.array(
                    [
                        [-1.0, 1.0, 1.0],
                        [
                            0.0,
                            f1 * (e - 3.0 * f2) / (f2 * e - 2.0 * f1**2 - f2**2),
                            f1 * (e + 3.0 * f2) / (f2 * e + 2.0 * f1**2 + f2**2),
                        ],
                        [1.0, 1.0, 1.0],
                    ],
                    dtype=complex,
                )
            return values, vectors
        return self._diagonalize_numeric(mat)

    def _diagonalize_numeric(self, mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        values, vectors = np.linalg.eig(mat)
        ref = self._reference_vectors
        order = _match_by_overlap(ref, vectors, values)
        return values[order], vectors[:, order]

    @cached_property
    def _reference_vectors(self) -> np.ndarray:
        mat = laplace_kernel(self.config, self.S_REF)
        values, vectors = np.linalg.eig(mat)
        order = np.argsort(-values.real)
        return vectors[:, order]

    # ---- imaginary-axis (real) evaluation ----------------------------------

    def branch_values_imag_axis(self, varpi: float) -> np.ndarray:
        """Real branch values R_j(varpi), with D_j(-i varpi) = -i R_j."""
        return self._imag_axis_eig(varpi)[0]

    def _imag_axis_eig(self, varpi: float) -> tuple[np.ndarray, np.ndarray]:
        rmat = laplace_kernel_imag_axis(self.config, varpi)
        return self._diagonalize_real(rmat)

    def _diagonalize_real(self, rmat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Label-ordered eigenpairs of the real symmetric on-axis matrix."""
        if self.n == 1:
            return rmat[0, :1].copy(), np.ones((1, 1))
        evals, evecs = np.linalg.eigh(rmat)
        target = self._analytic_real_values(rmat)
        if target is not None:
            order = _match_values(evals, target)
        else:
            ref = np.real(self._reference_vectors)
            # orthonormalize the reference for a meaningful overlap score
            ref, _ = np.linalg.qr(ref)
            order = _match_by_overlap(ref, evecs, evals)
        return evals[order], evecs[:, order]

    def _analytic_real_values(self, rmat: np.ndarray) -> np.ndarray | None:
        if self.method == "analytic-N2":
            r0, r1 = rmat[0, 0], rmat[0, 1]
            return np.array([r0 + r1, r0 - r1])
        if self.method == "analytic-N3":
            r0, r1, r2 = rmat[0, 0], rmat[0, 1], rmat[0, 2]
            e = math.sqrt(8.0 * r1**2 + r2**2)
            return np.array([r0 - r2, r0 + 0.5 * (r2 + e), r0 + 0.5 * (r2 - e)])
        return None

    def branch_derivatives_imag_axis(self, varpi: float) -> np.ndarray:
        """Real values of d/ds D_j at s = -i varpi, for varpi < 0."""
        qmat = laplace_kernel_derivative_imag_axis(self.config, varpi)
        _, evecs = self._imag_axis_eig(varpi)
        return np.einsum("ij,ik,kj->j", evecs, qmat, evecs)

    def mixing_matrix_imag_axis(self, varpi: float) -> np.ndarray:
        _, evecs = self._imag_axis_eig(varpi)
        return mixing_from_vectors(evecs, self.config.initial_amplitudes)

    # ---- on-cut (removable-singularity) evaluation -------------------------

    def branch_value_on_cut(self, branch: int, varpi: float) -> float:
        """R_j(varpi) for varpi > 0 through the principal value across the cut.

        Exact (removable) when the branch spectral combination vanishes at
        varpi; used for the BIC matching condition.
        """
        values, _ = self._imag_axis_eig(varpi)
        return float(values[branch])

    def branch_derivative_on_cut(self, branch: int, varpi: float) -> float:
        """d(R_j)/d(varpi) on the cut (real, finite).

        When the branch spectral combination vanishes at ``varpi`` (a
        removable singularity, the embedded-state case) the combined
        integrand has a quadratic zero cancelling the squared pole and is
        integrated directly.  Elsewhere the squared-pole integral exists
        only as the derivative of the principal value, which is evaluated by
        central differencing of :meth:`branch_value_on_cut`.
        """
        combo = self.linear_combination(branch)
        xb = math.sqrt(2.0 * varpi)
        c0 = (
            None
            if combo is None
            else sum(a * math.cos(d * xb) for d, a in combo)
        )
        if combo is None or abs(c0) > 1e-8:
            step = 1e-5 * max(1.0, abs(varpi))
            return (
                self.branch_value_on_cut(branch, varpi + step)
                - self.branch_value_on_cut(branch, varpi - step)
            ) / (2.0 * step)
        pref = _prefactor(self.config.drive)
        # second derivative of the cosine combination, for the near-pole limit
        c2 = sum(-a * d**2 * math.cos(d * xb) for d, a in combo)

        def integrand(x):
            dx = x - xb
            if abs(dx) < 1e-7:
                return 4.0 * pref * math.exp(-(x**2)) * 0.5 * c2 / (x + xb) ** 2
            c = sum(a * math.cos(d * x) for d, a in combo)
            return 4.0 * pref * math.exp(-(x**2)) * c / (x**2 - xb**2) ** 2

        val = quad(integrand, 0.0, xb, **_QUAD_OPTS)[0]
        val += quad(integrand, xb, X_MAX, **_QUAD_OPTS)[0]
        return val

    # ---- derivatives off the axis ------------------------------------------

    def branch_derivative(self, branch: int, s: complex) -> complex:
        """d/ds D_j(s) by differentiating under the integral."""
        dmat = laplace_kernel_derivative(self.config, s)
        mat = laplace_kernel(self.config, s)
        values, vectors = self._diagonalize(mat)
        vinv = np.linalg.inv(vectors)
        return complex((vinv @ dmat @ vectors)[branch, branch])


def mixing_from_vectors(vectors: np.ndarray, c0: np.ndarray) -> np.ndarray:
    """Mixing matrix M with columns V[:, l] * (V^-1 c0)_l.

    Applying M to the all-ones vector reproduces V [..] V^-1 c0 for a
    diagonal middle factor.
    """
    weights = np.linalg.solve(vectors, c0.astype(complex))
    return vectors * weights[None, :]


def _match_values(evals: np.ndarray, target: np.ndarray) -> np.ndarray:
    cost = np.abs(evals[None, :] - target[:, None])
    rows, cols = linear_sum_assignment(cost)
    order = np.empty(len(evals), dtype=int)
    order[rows] = cols
    return order


def _match_by_overlap(
    ref: np.ndarray, vectors: np.ndarray, values: np.ndarray
) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=0)
    overlap = np.abs(ref.conj().T @ vectors) / norms[None, :]
    rows, cols = linear_sum_assignment(-overlap)
    order = np.empty(vectors.shape[1], dtype=int)
    order[rows] = cols
    chosen = overlap[rows, cols]
    if chosen.min() < 0.5:
        gaps = np.abs(np.subtract.outer(values, values))
        np.fill_diagonal(gaps, np.inf)
        raise BranchTrackingError(
            "ambiguous branch continuation: eigenvector overlap "
            f"{chosen.min():.3f} < 0.5",
            gap=float(gaps.min()),
        )
    return order

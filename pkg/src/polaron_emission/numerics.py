"""Numerical kernels: semi-infinite quadrature, 4x4 Liouvillian eigensystems,
half-line Fourier transforms of exponential sums and Gaussian convolution.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from .errors import DomainError, QuadratureError, ResolutionError

LN2 = np.log(2.0)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for ``integrate_semi_infinite``.

    The upper integration limit is ``truncation_multiplier * decay_scale``;
    integrands carrying a ``exp(-nu**2 / nu_c**2)`` factor are below 1e-27 at
    eight cutoffs.
    """

    relative_tolerance: float = 1e-11
    absolute_tolerance: float = 1e-14
    truncation_multiplier: float = 8.0
    max_subintervals: int = 2000

    def __post_init__(self):
        if not (self.relative_tolerance > 0 and self.absolute_tolerance > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.truncation_multiplier < 8:
            raise ValueError("truncation_multiplier must be >= 8")


DEFAULT_QUADRATURE = QuadratureSpec()


def _upper_limit(decay_scale, spec):
    if not decay_scale > 0:
        raise DomainError(f"decay_scale must be positive, got {decay_scale}")
    return spec.truncation_multiplier * decay_scale


def _quad_real(f, upper, spec):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            f,
            0.0,
            upper,
            epsabs=spec.absolute_tolerance,
            epsrel=spec.relative_tolerance,
            limit=spec.max_subintervals,
            full_output=1,
        )
    value, err = out[0], out[1]
    if len(out) == 4:
        # ier > 0; roundoff-limited results are still accepted when the
        # estimate sits comfortably inside a 1e3-times looser budget
        budget = 1e3 * max(spec.absolute_tolerance, spec.relative_tolerance * abs(value))
        if not err <= budget:
            raise QuadratureError("adaptive quadrature did not converge", err)
    return value, err


def integrate_semi_infinite(integrand, decay_scale, spec=DEFAULT_QUADRATURE):
    """Integrate ``integrand`` over ``(0, inf)``, truncated at
    ``spec.truncation_multiplier * decay_scale``.

    ``integrand`` may return complex values; real and imaginary parts are
    integrated separately with QUADPACK's adaptive Gauss-Kronrod rule.
    Raises ``QuadratureError`` when the error budget is not met.
    """
    upper = _upper_limit(decay_scale, spec)
    re_part, _ = _quad_real(lambda x: complex(integrand(x)).real, upper, spec)
    im_part, _ = _quad_real(lambda x: complex(integrand(x)).imag, upper, spec)
    return complex(re_part, im_part)


def integrate_semi_infinite_vec(integrand, decay_scale, spec=DEFAULT_QUADRATURE):
    """Vector-valued variant: ``integrand(nu)`` returns a real 1-d array.

    Uses globally adaptive subdivision (``scipy.integrate.quad_vec``) with the
    max-norm error estimate across all components.
    """
    upper = _upper_limit(decay_scale, spec)
    value, err, info = integrate.quad_vec(
        integrand,
        0.0,
        upper,
        epsabs=spec.absolute_tolerance,
        epsrel=spec.relative_tolerance,
        norm="max",
        limit=50 * spec.max_subintervals,
        full_output=True,
    )
    if not info.success:
        raise QuadratureError("vector quadrature did not converge", err)
    return value


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Right eigenvectors are the columns of ``right_vectors``; left
    eigenvectors are the rows of ``left_vectors`` with ``left @ right = 1``.

    ``defective`` marks generators whose eigenvector basis is too
    ill-conditioned for the spectral form; callers then use ``expm``.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    defective: bool = False

    def reconstruct(self):
        return self.right_vectors @ np.diag(self.eigenvalues) @ self.left_vectors

    def kernel_index(self):
        """Index of the eigenvalue closest to zero."""
        return int(np.argmin(np.abs(self.eigenvalues)))


def eig_decompose(matrix, condition_limit=1e8):
    """Diagonalise a small complex matrix, flagging near-defective cases."""
    m = np.asarray(matrix, dtype=complex)
    vals, right = linalg.eig(m)
    order = np.lexsort((vals.imag, -vals.real))
    vals, right = vals[order], right[:, order]
    cond = np.linalg.cond(right)
    if not np.isfinite(cond) or cond > condition_limit:
        return EigenSystem(vals, right, np.full_like(right, np.nan), defective=True)
    left = np.linalg.inv(right)
    scale = max(np.linalg.norm(m), np.finfo(float).tiny)
    recon = np.linalg.norm(right @ np.diag(vals) @ left - m)
    defective = recon > 1e-10 * scale and recon > 1e-300
    return EigenSystem(vals, right, left, defective=bool(defective))


def half_line_fourier(exponential_sum, delta_omega):
    """Closed-form ``int_0^inf sum_k c_k exp(lam_k tau) exp(i dw tau) dtau``.

    ``exponential_sum`` is an iterable of ``(coefficient, exponent)`` pairs, or
    a 2-tuple of equal-length arrays. ``delta_omega`` may be scalar or array.
    """
    coeffs, exps = _as_terms(exponential_sum)
    if np.any(exps.real > 0):
        raise DomainError("exponent with positive real part: correlator does not decay")
    if np.any(exps == 0):
        raise DomainError("zero exponent must be handled as a coherent delta term")
    dw = np.asarray(delta_omega, dtype=float)
    out = -(coeffs[:, None] / (exps[:, None] + 1j * dw.reshape(1, -1))).sum(axis=0)
    return out.reshape(dw.shape) if dw.ndim else complex(out[0])


def _as_terms(exponential_sum):
    if (
        isinstance(exponential_sum, tuple)
        and len(exponential_sum) == 2
        and np.ndim(exponential_sum[0]) == 1
    ):
        coeffs, exps = exponential_sum
    else:
        pairs = list(exponential_sum)
        coeffs = [p[0] for p in pairs]
        exps = [p[1] for p in pairs]
    return np.asarray(coeffs, dtype=complex), np.asarray(exps, dtype=complex)


def evaluate_exponential_sum(exponential_sum, tau):
    coeffs, exps = _as_terms(exponential_sum)
    t = np.asarray(tau, dtype=float)
    return (coeffs[None, :] * np.exp(np.outer(t.ravel(), exps))).sum(axis=1).reshape(t.shape)


def propagate(matrix, vector, times, eigensystem=None):
    """``exp(matrix * t) @ vector`` for every ``t`` in ``times``.

    Spectral form when the eigensystem is usable, otherwise scaling-and-squaring
    ``expm`` per time point. Returns an array of shape ``(len(times), n)``.
    """
    m = np.asarray(matrix, dtype=complex)
    v = np.asarray(vector, dtype=complex)
    t = np.asarray(times, dtype=float)
    es = eigensystem if eigensystem is not None else eig_decompose(m)
    if not es.defective:
        amps = es.left_vectors @ v
        return (np.exp(np.outer(t, es.eigenvalues)) * amps) @ es.right_vectors.T
    return np.array([linalg.expm(m * ti) @ v for ti in t])


def gaussian_response(x, fwhm):
    """Detector response ``R(x) = (2/fwhm) sqrt(ln2/pi) exp(-4 ln2 x^2/fwhm^2)``."""
    x = np.asarray(x, dtype=float)
    return (2.0 / fwhm) * np.sqrt(LN2 / np.pi) * np.exp(-4.0 * LN2 * x**2 / fwhm**2)


def convolve_gaussian(series, spacing, fwhm):
    """Convolve uniformly sampled ``series`` with the Gaussian response.

    The series is padded with its edge values beyond the sampled window. The
    discrete kernel is normalised so that ``sum(R) * spacing == 1``.
    A response narrower than ``spacing / 100`` is treated as a delta function.
    """
    y = np.asarray(series, dtype=float)
    if fwhm <= spacing / 100.0:
        return y.copy()
    if spacing > fwhm / 40.0:
        raise ResolutionError(
            f"grid spacing {spacing:g} exceeds fwhm/40 = {fwhm / 40.0:g}"
        )
    half = int(np.ceil(6.0 * fwhm / spacing))
    kernel = gaussian_response(np.arange(-half, half + 1) * spacing, fwhm)
    kernel /= kernel.sum()
    padded = np.pad(y, half, mode="edge")
    return np.convolve(padded, kernel, mode="valid")

"""Phonon bath: spectral density, Franck-Condon factor and polaron-frame
correlation functions.

Units: hbar = 1, times in ps, frequencies in 1/ps, temperatures in K.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import constants
from scipy.integrate import simpson

from . import numerics
from .errors import ConfigurationError, DomainError

#: k_B / hbar in 1/(ps K)
K_OVER_HBAR = constants.k / constants.hbar * 1e-12

#: below this fraction of the cutoff the thermal kernel uses its nu -> 0 limit
SMALL_NU_FRACTION = 1e-4

RATE_TAU_MAX = 50.0
RATE_TAU_STEP = 0.005


@dataclass(frozen=True)
class PhononEnvironment:
    """Super-ohmic bath ``J(nu) = alpha nu^3 exp(-nu^2/nu_c^2)`` at temperature T."""

    alpha: float = 0.03  # ps^2
    nu_c: float = 2.2  # 1/ps
    temperature: float = 4.0  # K

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ConfigurationError(f"alpha must be >= 0, got {self.alpha}")
        if not self.nu_c > 0:
            raise ConfigurationError(f"nu_c must be > 0, got {self.nu_c}")
        if not self.temperature >= 0:
            raise ConfigurationError(f"temperature must be >= 0, got {self.temperature}")

    @property
    def beta(self):
        """Inverse temperature in ps; ``inf`` at T = 0 (or when k_B T underflows)."""
        kt = K_OVER_HBAR * self.temperature
        return np.inf if kt == 0 else 1.0 / kt


def spectral_density(nu, env):
    nu_arr = np.asarray(nu, dtype=float)
    if np.any(nu_arr < 0):
        raise DomainError("spectral density is defined for nu >= 0 only")
    out = env.alpha * nu_arr**3 * np.exp(-(nu_arr**2) / env.nu_c**2)
    return out if out.ndim else float(out)


def thermal_kernel(nu, env):
    """``J(nu)/nu^2 * coth(beta nu / 2)`` with the removable singularity at 0 filled.

    At T = 0 the hyperbolic factor is exactly 1.
    """
    nu_arr = np.asarray(nu, dtype=float)
    gauss = np.exp(-(nu_arr**2) / env.nu_c**2)
    beta = env.beta
    if not np.isfinite(beta):
        out = env.alpha * nu_arr * gauss
    else:
        small = nu_arr < SMALL_NU_FRACTION * env.nu_c
        safe = np.where(small, 1.0, nu_arr)
        out = np.where(
            small, 2.0 * env.alpha / beta, env.alpha * safe / np.tanh(0.5 * beta * safe)
        ) * gauss
    return out if out.ndim else float(out)


def bare_kernel(nu, env):
    """``J(nu)/nu^2`` (the part multiplying ``-i sin(nu tau)``)."""
    nu_arr = np.asarray(nu, dtype=float)
    out = env.alpha * nu_arr * np.exp(-(nu_arr**2) / env.nu_c**2)
    return out if out.ndim else float(out)


@functools.lru_cache(maxsize=64)
def displacement_factor(env, spec=numerics.DEFAULT_QUADRATURE):
    """Franck-Condon factor ``B = exp(-1/2 int J(nu)/nu^2 coth(beta nu/2) dnu)``."""
    if env.alpha == 0:
        return 1.0
    integral = numerics.integrate_semi_infinite(
        lambda nu: thermal_kernel(nu, env), env.nu_c, spec
    ).real
    return float(np.exp(-0.5 * integral))


def phonon_phase(env, tau_grid, spec=numerics.DEFAULT_QUADRATURE):
    """``phi(tau) = int J/nu^2 (coth(beta nu/2) cos(nu tau) - i sin(nu tau)) dnu``."""
    tau = np.asarray(tau_grid, dtype=float)
    if env.alpha == 0:
        return np.zeros(tau.shape, dtype=complex)
    n = tau.size

    def integrand(nu):
        arg = nu * tau
        return np.concatenate(
            [thermal_kernel(nu, env) * np.cos(arg), -bare_kernel(nu, env) * np.sin(arg)]
        )

    parts = numerics.integrate_semi_infinite_vec(integrand, env.nu_c, spec)
    return parts[:n] + 1j * parts[n:]


@dataclass(frozen=True, eq=False)
class PhononCorrelations:
    """Short-time phonon functions sampled on a uniform grid starting at 0.

    ``G = B^2 exp(phi)``, ``C = B^2 exp(-phi)``, ``Gcal = exp(phi - conj(phi))``.
    Beyond ``tau[-1]`` the functions are held at their plateaus
    (``B^2``, ``B^2`` and ``1``).
    """

    tau: np.ndarray
    phi: np.ndarray
    G: np.ndarray
    C: np.ndarray
    Gcal: np.ndarray
    B: float

    @property
    def tau_max(self):
        return float(self.tau[-1])

    @property
    def spacing(self):
        return float(self.tau[1] - self.tau[0])

    def _interp(self, values, tau, plateau):
        t = np.asarray(tau, dtype=float)
        re = np.interp(t, self.tau, values.real, right=plateau)
        im = np.interp(t, self.tau, values.imag, right=0.0)
        return re + 1j * im

    def G_at(self, tau):
        return self._interp(self.G, tau, self.B**2)

    def C_at(self, tau):
        return self._interp(self.C, tau, self.B**2)

    def Gcal_at(self, tau):
        return self._interp(self.Gcal, tau, 1.0)


def uniform_grid(step, tau_max):
    n = int(round(tau_max / step))
    return np.linspace(0.0, n * step, n + 1)


def default_phonon_grid(step=0.005, tau_max=20.0):
    return uniform_grid(step, tau_max)


def check_phonon_grid(tau, env):
    tau = np.asarray(tau, dtype=float)
    if tau.ndim != 1 or tau.size < 3 or tau[0] != 0.0:
        raise ConfigurationError("phonon grid must be 1-d, start at 0 and have >= 3 points")
    steps = np.diff(tau)
    h = steps[0]
    if not np.allclose(steps, h, rtol=1e-9, atol=1e-12):
        raise ConfigurationError("phonon grid must be uniform")
    if h > 0.01 + 1e-12:
        raise ConfigurationError(f"phonon grid spacing {h:g} ps exceeds 0.01 ps")
    if tau[-1] < 20.0 / env.nu_c - 1e-9:
        raise ConfigurationError(
            f"phonon grid span {tau[-1]:g} ps is shorter than 20/nu_c = {20.0 / env.nu_c:g} ps"
        )


def phonon_correlations(env, tau_grid=None):
    tau = default_phonon_grid() if tau_grid is None else np.asarray(tau_grid, dtype=float)
    check_phonon_grid(tau, env)
    return _correlations_on(env, tau)


def _correlations_on(env, tau):
    B = displacement_factor(env)
    phi = phonon_phase(env, tau)
    return PhononCorrelations(
        tau=tau,
        phi=phi,
        G=B**2 * np.exp(phi),
        C=B**2 * np.exp(-phi),
        Gcal=np.exp(phi - np.conj(phi)),
        B=B,
    )


@functools.lru_cache(maxsize=16)
def _rate_correlations(env):
    return _correlations_on(env, uniform_grid(RATE_TAU_STEP, RATE_TAU_MAX))


@dataclass(frozen=True)
class PolaronQuantities:
    """Franck-Condon factor, renormalised Rabi frequency and phonon rates.

    The rates already include the ``(omega/2)^2`` interaction prefactor.
    """

    B: float
    omega: float
    omega_r: float
    gamma_x: complex
    chi_y: complex
    chi_z: complex


def polaron_rates(env, omega):
    """Phonon-induced rates ``Gamma_x``, ``chi_y``, ``chi_z`` for drive ``omega``.

    ``Lambda_xx = B^2 (e^phi + e^-phi - 2)/2`` and ``Lambda_yy = B^2 (e^phi - e^-phi)/2``
    are integrated with Simpson's rule on a 0.005 ps grid up to 50 ps.
    """
    if not omega >= 0:
        raise DomainError(f"omega must be >= 0, got {omega}")
    B = displacement_factor(env)
    omega_r = omega * B
    if env.alpha == 0 or omega == 0:
        return PolaronQuantities(B, omega, omega_r, 0j, 0j, 0j)
    pc = _rate_correlations(env)
    tau, phi = pc.tau, pc.phi
    lam_xx = B**2 * (np.cosh(phi) - 1.0)
    lam_yy = B**2 * np.sinh(phi)
    pref = (omega / 2.0) ** 2
    gamma_x = pref * simpson(lam_xx, x=tau)
    chi_y = pref * simpson(np.cos(omega_r * tau) * lam_yy, x=tau)
    chi_z = pref * simpson(np.sin(omega_r * tau) * lam_yy, x=tau)
    return PolaronQuantities(B, omega, omega_r, complex(gamma_x), complex(chi_y), complex(chi_z))

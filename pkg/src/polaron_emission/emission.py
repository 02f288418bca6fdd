"""First-order coherence, coherent fraction and the ZPL / phonon-sideband
decomposition of the resonance-fluorescence spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal, special
from scipy.integrate import simpson

from . import numerics
from .dynamics import (
    IDENTITY,
    NUMBER,
    SIGMA,
    SIGMA_DAG,
    CorrelationSeries,
    _eigensystem,
    _matrix,
    expectation,
    regression_correlator,
    regression_expsum,
    vec,
)
from .errors import ConfigurationError, UndefinedQuantityError

__all__ = [
    "CorrelationSeries",
    "Spectrum",
    "first_order_coherence",
    "g1_total",
    "coherent_fraction",
    "incoherent_spectrum",
    "sideband_power_fraction",
    "power_budget",
]


def first_order_coherence(L, rho_ss, tau_grid):
    """``g0(tau) = <sigma^dag(t) sigma(t+tau)>`` from the master equation."""
    return regression_correlator(L, rho_ss, IDENTITY, SIGMA_DAG, SIGMA, tau_grid, kind="g0")


def _check_phonon_coverage(pc, tau):
    if tau.size and tau[0] == 0 and pc.tau[0] != 0:
        raise ConfigurationError("phonon grid must start at tau = 0")
    short = tau[tau <= pc.tau_max]
    if short.size > 1 and pc.spacing > 0.01 + 1e-12:
        raise ConfigurationError("phonon grid is too coarse for the short-delay region")


def g1_total(g0, pc, markovian=False):
    """``g1(tau) = G(-tau) g0(tau)`` with ``G(-tau) = conj(G(tau))``.

    The Markovian variant replaces ``G(-tau)`` by its plateau ``B^2``.
    """
    if markovian:
        factor = pc.B**2
    else:
        _check_phonon_coverage(pc, g0.tau)
        factor = np.conj(pc.G_at(g0.tau))
    return CorrelationSeries(g0.tau, factor * g0.values, "g1_total")


def coherent_fraction(L, rho_ss, pc, markovian=False):
    """Long-delay plateau of ``g1`` divided by ``g1(0)``.

    Non-Markovian: ``B^2 |<sigma>|^2 / <n>``; Markovian: ``|<sigma>|^2 / <n>``.
    """
    n = expectation(rho_ss, NUMBER).real
    if n <= 0:
        raise UndefinedQuantityError("excited population is zero; coherent fraction undefined")
    coh = abs(expectation(rho_ss, SIGMA)) ** 2 / n
    return coh if markovian else pc.B**2 * coh


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Incoherent spectrum on ``delta_omega = omega - omega_l``.

    ``coherent_weight`` is the weight of the elastic delta peak, which is never
    binned onto the grid; its contribution to ``int S d(omega)`` is
    ``pi * coherent_weight``.
    """

    delta_omega: np.ndarray
    total: np.ndarray
    zpl: np.ndarray
    sideband: np.ndarray
    coherent_weight: float
    g0_zero: float
    B: float


def _zpl_terms(L, rho_ss):
    """Exponential sum of ``g0(tau) - |<sigma>|^2`` (kernel term removed)."""
    terms = regression_expsum(L, rho_ss, IDENTITY, SIGMA_DAG, SIGMA)
    if terms is None:
        return None
    coeffs, exps = terms
    keep = np.ones(exps.size, dtype=bool)
    keep[_eigensystem(L).kernel_index()] = False
    return coeffs[keep], exps[keep]


def _zpl_resolvent(L, rho_ss, delta_omega):
    """Fallback for defective generators: ``-(L - P0 + i dw)^-1`` on the decaying part."""
    m = _matrix(L)
    p0 = np.outer(vec(rho_ss), vec(IDENTITY).conj())
    v0 = vec(rho_ss @ SIGMA_DAG)
    w = v0 - p0 @ v0
    obs = vec(SIGMA.T)
    eye = np.eye(4)
    return np.array(
        [-(obs @ np.linalg.solve(m - p0 + 1j * dw * eye, w)) for dw in np.atleast_1d(delta_omega)]
    )


def zpl_transform(L, rho_ss, delta_omega):
    """Complex ``int_0^inf (g0(tau) - |<sigma>|^2) exp(i dw tau) dtau``."""
    terms = _zpl_terms(L, rho_ss)
    if terms is None:
        return _zpl_resolvent(L, rho_ss, delta_omega)
    return numerics.half_line_fourier(terms, np.atleast_1d(delta_omega))


def _fourier_on_grid(values, tau, delta_omega, chunk=256):
    """``int_0^inf values(tau) exp(i dw tau) dtau``: Simpson's rule on the grid
    plus a closed-form tail ``Re values ~ c2/tau^2 + c4/tau^4`` past the grid end.

    The inverse-power tail is the zero-temperature asymptote of the phonon
    phase; at finite temperature both coefficients are negligibly small.
    When both grids are uniform the Simpson sum is evaluated as a chirp-z
    transform.
    """
    out = _simpson_czt(values, tau, delta_omega)
    if out is None:
        out = np.empty(delta_omega.size, dtype=complex)
        for start in range(0, delta_omega.size, chunk):
            dw = delta_omega[start : start + chunk]
            phase = np.exp(1j * np.outer(dw, tau))
            out[start : start + chunk] = simpson(phase * values[None, :], x=tau, axis=1)
    c2, c4 = _tail_coefficients(values.real, tau)
    if c2 != 0.0 or c4 != 0.0:
        e_n = _expint_tail(delta_omega, tau[-1], 4)
        out += c2 * e_n[2] + c4 * e_n[4]
    return out


def _is_uniform(x):
    if x.size < 3:
        return False
    step = np.diff(x)
    return bool(np.allclose(step, step[0], rtol=1e-9, atol=0.0))


def _simpson_czt(values, tau, delta_omega):
    """Composite Simpson sum via ``scipy.signal.czt``; ``None`` if not applicable."""
    if tau[0] != 0 or tau.size % 2 == 0 or not (_is_uniform(tau) and _is_uniform(delta_omega)):
        return None
    h = tau[1] - tau[0]
    weights = np.full(tau.size, 2.0)
    weights[1::2] = 4.0
    weights[0] = weights[-1] = 1.0
    x = values * weights * (h / 3.0)
    d = delta_omega[1] - delta_omega[0]
    # X_n = sum_k x_k z_n^-k with z_n = a w^-n = exp(-i (dw_0 + n d) h)
    a = np.exp(-1j * delta_omega[0] * h)
    w = np.exp(1j * d * h)
    return signal.czt(x, m=delta_omega.size, w=w, a=a)


def _tail_coefficients(y, tau):
    """Fit ``y = c2/tau^2 + c4/tau^4`` through the last sample and the one at 3/4 span."""
    i_end = tau.size - 1
    i_mid = int(round(0.75 * i_end))
    t1, t2 = tau[i_mid], tau[i_end]
    a = np.array([[t1**-2, t1**-4], [t2**-2, t2**-4]])
    c2, c4 = np.linalg.solve(a, [y[i_mid], y[i_end]])
    return float(c2), float(c4)


def _expint_tail(delta_omega, t_end, order):
    """``{n: int_T^inf exp(i w tau) / tau^n dtau}`` for ``n = 1..order``.

    Uses ``T^(1-n) E_n(-i w T)`` with the upward recurrence
    ``E_{n+1}(z) = (exp(-z) - z E_n(z)) / n``; ``w = 0`` is handled separately.
    """
    w = np.asarray(delta_omega, dtype=float)
    nz = w != 0
    z = -1j * w[nz] * t_end
    e = special.exp1(z)
    out = {}
    for n in range(1, order + 1):
        vals = np.empty(w.shape, dtype=complex)
        vals[nz] = t_end ** (1 - n) * e
        vals[~nz] = np.inf if n == 1 else t_end ** (1 - n) / (n - 1)
        out[n] = vals
        e = (np.exp(-z) - z * e) / n
    return out


def incoherent_spectrum(L, rho_ss, pc, delta_omega_grid, markovian=False, exact_sideband=False):
    """Zero-phonon-line and phonon-sideband parts of the incoherent spectrum.

    By default the sideband uses ``g0(tau) ~ g0(0)`` over the phonon memory
    time; ``exact_sideband`` transforms the full product ``(G(-tau) - B^2) g0(tau)``
    on the phonon grid instead.
    """
    dw = np.asarray(delta_omega_grid, dtype=float)
    B2 = pc.B**2
    n = expectation(rho_ss, NUMBER).real
    coh = abs(expectation(rho_ss, SIGMA)) ** 2
    zpl = B2 * zpl_transform(L, rho_ss, dw).real
    if markovian:
        sideband = np.zeros_like(dw)
    else:
        _check_phonon_coverage(pc, pc.tau)
        kernel = np.conj(pc.G) - B2
        if exact_sideband:
            g0 = first_order_coherence(L, rho_ss, pc.tau).values
            sideband = _fourier_on_grid(kernel * g0, pc.tau, dw).real
        else:
            sideband = (n * _fourier_on_grid(kernel, pc.tau, dw)).real
    return Spectrum(
        delta_omega=dw,
        total=zpl + sideband,
        zpl=zpl,
        sideband=sideband,
        coherent_weight=B2 * coh,
        g0_zero=n,
        B=pc.B,
    )


def sideband_power_fraction(env):
    """Share ``1 - B^2`` of the emitted power carried by the phonon sideband."""
    from .phonon import displacement_factor

    return 1.0 - displacement_factor(env) ** 2


def power_budget(spectrum, L=None, rho_ss=None):
    """Frequency-integrated powers of a spectrum.

    The sideband is integrated numerically over the spectrum's grid (trapezoid).
    The zero-phonon line is integrated in closed form when ``L`` and ``rho_ss``
    are given (each Lorentzian contributes ``pi * Re c_k``), otherwise
    numerically. Returns a dict with the integrals and the sideband fraction of
    the total emission (coherent peak included).
    """
    sideband = float(np.trapezoid(spectrum.sideband, spectrum.delta_omega))
    if L is not None and rho_ss is not None:
        terms = _zpl_terms(L, rho_ss)
        if terms is not None:
            zpl = float(np.pi * spectrum.B**2 * terms[0].real.sum())
        else:
            zpl = float(np.pi * spectrum.B**2 * (spectrum.g0_zero - spectrum.coherent_weight / spectrum.B**2))
    else:
        zpl = float(np.trapezoid(spectrum.zpl, spectrum.delta_omega))
    coherent = float(np.pi * spectrum.coherent_weight)
    total = zpl + sideband + coherent
    return {
        "sideband_integral": sideband,
        "zpl_integral": zpl,
        "coherent_integral": coherent,
        "total_integral": total,
        "sideband_fraction": sideband / total if total > 0 else float("nan"),
        "expected_sideband_integral": float(np.pi * (1 - spectrum.B**2) * spectrum.g0_zero),
    }

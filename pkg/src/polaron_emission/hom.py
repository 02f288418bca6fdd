"""Hong-Ou-Mandel two-photon interference in an unbalanced Mach-Zehnder setup,
with finite detector time resolution.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import numerics
from .dynamics import (
    IDENTITY,
    NUMBER,
    SIGMA,
    SIGMA_DAG,
    CorrelationSeries,
    DriveConfig,
    build_liouvillian,
    expectation,
    merge_grids,
    optical_tau_grid,
    regression_correlator,
    steady_state,
)
from .errors import ConfigurationError, PolaronEmissionError, UndefinedQuantityError
from .phonon import phonon_correlations, polaron_rates

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DetectorModel:
    fwhm: float = 400.0  # ps

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ConfigurationError(f"detector fwhm must be > 0, got {self.fwhm}")


@dataclass(frozen=True, eq=False)
class HomResult:
    raw: CorrelationSeries
    convolved: CorrelationSeries
    dip_depth: float
    asymptote: float


def hom_tau_grid(gamma, fwhm, pc=None, n_points=2000, optical_span=None):
    """Phonon grid merged with geometric spacing out to ``optical_span + 5 fwhm``.

    ``optical_span`` defaults to ``10/gamma`` and may not be shorter than ``5/gamma``.
    """
    span = 10.0 / gamma if optical_span is None else float(optical_span)
    if span < 5.0 / gamma:
        raise ConfigurationError(f"optical span {span:g} ps is shorter than 5/gamma")
    optical = optical_tau_grid(gamma, n_points=n_points, tau_max=span + 5.0 * fwhm)
    return optical if pc is None else merge_grids(pc.tau, optical)


def hom_terms(L, rho_ss, tau):
    """Regression correlators entering the HOM coincidence rate.

    t1 = <s^+(t) s^+(t+tau) s(t+tau) s(t)>, t2 = <s^+(t) n(t+tau)>,
    t3 = <s^+(t) s^+(t+tau) s(t)>, t4 = <s^+(t+tau) s(t)>, t5 = <s(t+tau) s(t)>.

    ``t3`` carries the same net phase as ``<s>^*``, so ``<s> t3`` is
    invariant under ``s -> exp(i theta) s`` and factorises to ``|<s>|^2 <n>``
    at long delay, cancelling the ``<s> t2`` term there.
    """
    return {
        "t1": regression_correlator(L, rho_ss, SIGMA, SIGMA_DAG, NUMBER, tau).values,
        "t2": regression_correlator(L, rho_ss, IDENTITY, SIGMA_DAG, NUMBER, tau).values,
        "t3": regression_correlator(L, rho_ss, SIGMA, SIGMA_DAG, SIGMA_DAG, tau).values,
        "t4": regression_correlator(L, rho_ss, SIGMA, IDENTITY, SIGMA_DAG, tau).values,
        "t5": regression_correlator(L, rho_ss, SIGMA, IDENTITY, SIGMA, tau).values,
    }


def g2_hom(L, rho_ss, pc, tau_grid, markovian=False):
    """Normalised HOM correlation before detector convolution.

    Non-Markovian: the phonon factors ``G``, ``C`` and ``Gcal`` follow the
    sampled short-time functions. Markovian: every displacement operator is
    replaced by its mean ``B``, so each term carries ``B^4`` and the factor
    cancels on normalisation.

    The series is divided by ``<n>^2 - B^4 |<s>|^4`` and then rescaled so the
    last sample equals 1; ``info`` records the pre-rescale asymptote and scale.
    """
    tau = np.asarray(tau_grid, dtype=float)
    n = expectation(rho_ss, NUMBER).real
    s = expectation(rho_ss, SIGMA)
    B2 = pc.B**2
    t = hom_terms(L, rho_ss, tau)
    if markovian:
        field = 1.0
        G = C = np.ones_like(tau)
        Gcal = np.ones_like(tau)
    else:
        field = B2
        G, C, Gcal = pc.G_at(tau), pc.C_at(tau), pc.Gcal_at(tau)
    coincidences = 0.5 * (
        t["t1"].real
        + 2.0 * np.real(field * s * (t["t2"] - Gcal * t["t3"]))
        - np.abs(G) ** 2 * np.abs(t["t4"]) ** 2
        - np.abs(C) ** 2 * np.abs(t["t5"]) ** 2
        + n**2
    )
    bfac = 1.0 if markovian else B2**2
    denom = n**2 - bfac * abs(s) ** 4
    if denom < 1e-14 * max(n**2, 1e-300) or n <= 0:
        raise UndefinedQuantityError("HOM normalisation vanishes (is the drive zero?)")
    g2 = coincidences / denom
    asymptote = float(g2[-1])
    return CorrelationSeries(
        tau,
        (g2 / asymptote).astype(complex),
        "g2_raw",
        info={"asymptote": asymptote, "scale": 1.0 / asymptote, "normalisation": float(denom)},
    )


def _bin_average(tau, values, centres, width):
    """Mean of the piecewise-linear interpolant over ``[c - w/2, c + w/2]``,
    with cells clipped to the sampled range."""
    cumulative = np.concatenate(
        [[0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(tau))]
    )

    def primitive(x):
        idx = np.clip(np.searchsorted(tau, x, side="right") - 1, 0, tau.size - 2)
        dx = x - tau[idx]
        slope = (values[idx + 1] - values[idx]) / (tau[idx + 1] - tau[idx])
        return cumulative[idx] + values[idx] * dx + 0.5 * slope * dx**2

    lo = np.clip(centres - 0.5 * width, tau[0], tau[-1])
    hi = np.clip(centres + 0.5 * width, tau[0], tau[-1])
    return (primitive(hi) - primitive(lo)) / (hi - lo)


def detector_convolved_g2(raw, det, points_per_fwhm=50, spacing=None):
    """Even-extend ``raw`` to negative delays and convolve with the detector response.

    The raw series is cell-averaged onto a uniform grid of spacing
    ``fwhm / points_per_fwhm`` (or ``spacing``), which keeps the weight of
    picosecond features that a point sample would miss. A response narrower
    than ``spacing / 100`` acts as a delta function and the raw series is
    sampled directly. Returns the ``tau >= 0`` half.
    """
    tau = raw.tau
    if tau[-1] < 5.0 * det.fwhm:
        raise ConfigurationError(
            f"raw series spans {tau[-1]:g} ps, needs at least 5 fwhm = {5 * det.fwhm:g} ps"
        )
    h = det.fwhm / points_per_fwhm if spacing is None else float(spacing)
    n_half = int(np.floor(tau[-1] / h + 1e-9))
    grid = np.arange(n_half + 1) * h
    values = raw.values.real
    if det.fwhm <= h / 100.0:
        sampled = np.interp(grid, tau, values)
        return CorrelationSeries(grid, sampled.astype(complex), "g2_convolved", info={"spacing": h})
    two_sided_tau = np.concatenate([-tau[:0:-1], tau])
    two_sided = np.concatenate([values[:0:-1], values])
    centres = np.concatenate([-grid[:0:-1], grid])
    binned = _bin_average(two_sided_tau, two_sided, centres, h)
    conv = numerics.convolve_gaussian(binned, h, det.fwhm)
    half = conv[n_half:]
    return CorrelationSeries(grid, half.astype(complex), "g2_convolved", info={"spacing": h})


def hom_pipeline(env, drive, det, markovian=False, pc=None, n_points=2000, optical_span=None):
    """Rates -> Liouvillian -> steady state -> g2 -> detector convolution."""
    pc = phonon_correlations(env) if pc is None else pc
    pq = polaron_rates(env, drive.omega)
    L = build_liouvillian(drive, pq)
    rho = steady_state(L)
    tau = hom_tau_grid(drive.gamma, det.fwhm, pc, n_points, optical_span)
    raw = g2_hom(L, rho, pc, tau, markovian=markovian)
    conv = detector_convolved_g2(raw, det)
    return HomResult(
        raw=raw,
        convolved=conv,
        dip_depth=float(1.0 - conv.values[0].real),
        asymptote=raw.info["asymptote"],
    )


class SweepPoint(NamedTuple):
    s: float
    dip_depth: float
    error: Optional[str] = None


def dip_depth_sweep(env, drive_template, det, s_values, markovian=False, pc=None, optical_span=None):
    """Convolved dip depth ``1 - g2(0)`` for each saturation parameter.

    ``omega = s gamma / sqrt(2)`` per point; failures are recorded per entry
    with ``dip_depth = nan`` and the sweep continues.
    """
    s_arr = np.asarray(s_values, dtype=float)
    if np.any(s_arr <= 0) or np.any(np.diff(s_arr) <= 0):
        raise ConfigurationError("s_values must be positive and strictly ascending")
    pc = phonon_correlations(env) if pc is None else pc
    out = []
    for s in s_arr:
        drive = DriveConfig.from_saturation(
            s, gamma=drive_template.gamma, detuning_tilde=drive_template.detuning_tilde
        )
        try:
            res = hom_pipeline(
                env, drive, det, markovian=markovian, pc=pc, optical_span=optical_span
            )
            out.append(SweepPoint(float(s), res.dip_depth))
        except (PolaronEmissionError, ArithmeticError, ValueError) as exc:
            log.warning("sweep point s=%g failed: %s", s, exc)
            out.append(SweepPoint(float(s), float("nan"), str(exc)))
    return out

"""Polaron-frame master equation for the driven two-level emitter.

Density operators are 2x2 arrays in the basis ``(|0>, |X>)``. Superoperators
act on column-stacked vectors ``(rho_00, rho_X0, rho_0X, rho_XX)``, so that
``vec(A rho B) = kron(B.T, A) @ vec(rho)``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import ConfigurationError, SteadyStateError

IDENTITY = np.eye(2, dtype=complex)
SIGMA = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><X|
SIGMA_DAG = SIGMA.conj().T
SIGMA_X = SIGMA + SIGMA_DAG
SIGMA_Y = 1j * (SIGMA - SIGMA_DAG)
SIGMA_Z = SIGMA_DAG @ SIGMA - SIGMA @ SIGMA_DAG
NUMBER = SIGMA_DAG @ SIGMA


def vec(op):
    return np.asarray(op, dtype=complex).reshape(-1, order="F")


def unvec(v):
    return np.asarray(v, dtype=complex).reshape(2, 2, order="F")


def spre(a):
    """Superoperator for ``rho -> a @ rho``."""
    return np.kron(IDENTITY, a)


def spost(b):
    """Superoperator for ``rho -> rho @ b``."""
    return np.kron(b.T, IDENTITY)


def trace_row():
    """Row vector ``t`` with ``t @ vec(rho) == tr(rho)``."""
    return vec(IDENTITY).conj()


@dataclass(frozen=True)
class DriveConfig:
    omega: float = 0.01  # bare Rabi frequency, 1/ps
    gamma: float = 1.0 / 700.0  # spontaneous emission rate, 1/ps
    detuning_tilde: float = 0.0  # polaron-shifted detuning, 1/ps

    def __post_init__(self):
        if not self.omega >= 0:
            raise ConfigurationError(f"omega must be >= 0, got {self.omega}")
        if not self.gamma > 0:
            raise ConfigurationError(f"gamma must be > 0, got {self.gamma}")

    @property
    def saturation(self):
        """``s = sqrt(2) omega / gamma``."""
        return np.sqrt(2.0) * self.omega / self.gamma

    @classmethod
    def from_saturation(cls, s, gamma=1.0 / 700.0, detuning_tilde=0.0):
        return cls(omega=s * gamma / np.sqrt(2.0), gamma=gamma, detuning_tilde=detuning_tilde)


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """4x4 generator on column-stacked density operators."""

    matrix: np.ndarray
    gamma: float = field(default=np.nan)

    @functools.cached_property
    def eigensystem(self):
        return numerics.eig_decompose(self.matrix)

    def __matmul__(self, other):
        return self.matrix @ other


def _phonon_dissipator(pq):
    """``-sum_j ([s_x, s_j rho] G_j + [s_y, s_j rho] chi_j + h.c.)`` with
    ``Gamma_y = Gamma_z = chi_x = 0``.

    The hermitian-conjugate part is continued linearly: ``(A B rho)^dag -> rho B A``.
    """
    terms = (
        (SIGMA_X, SIGMA_X, pq.gamma_x),
        (SIGMA_Y, SIGMA_Y, pq.chi_y),
        (SIGMA_Y, SIGMA_Z, pq.chi_z),
    )
    out = np.zeros((4, 4), dtype=complex)
    for a, b, rate in terms:
        if rate == 0:
            continue
        # [a, b rho] = a b rho - b rho a
        direct = spre(a @ b) - spre(b) @ spost(a)
        # h.c.: rho b a - a rho b  (a, b Hermitian)
        conj = spost(b @ a) - spre(a) @ spost(b)
        out -= rate * direct + np.conj(rate) * conj
    return out


def build_liouvillian(drive, pq, allow_detuning=False):
    """Assemble coherent, phonon and radiative parts of the generator.

    ``pq`` must have been computed for ``drive.omega``. A nonzero
    ``drive.detuning_tilde`` is rejected unless ``allow_detuning`` is set; the
    phonon rates are derived for resonant driving only.
    """
    if not np.isclose(pq.omega, drive.omega, rtol=1e-12, atol=0.0):
        raise ConfigurationError(
            f"polaron quantities were computed for omega={pq.omega}, drive has {drive.omega}"
        )
    if not np.isclose(pq.omega_r, drive.omega * pq.B, rtol=1e-12, atol=1e-300):
        raise ConfigurationError("omega_r is inconsistent with omega * B")
    if drive.detuning_tilde != 0 and not allow_detuning:
        raise ConfigurationError(
            "nonzero detuning_tilde is outside the resonant model; pass allow_detuning=True"
        )
    h = 0.5 * pq.omega_r * SIGMA_X + drive.detuning_tilde * NUMBER
    coherent = -1j * (spre(h) - spost(h))
    radiative = 0.5 * drive.gamma * (
        2.0 * spre(SIGMA) @ spost(SIGMA_DAG) - spre(NUMBER) - spost(NUMBER)
    )
    return Liouvillian(coherent + _phonon_dissipator(pq) + radiative, gamma=drive.gamma)


def _matrix(L):
    return L.matrix if isinstance(L, Liouvillian) else np.asarray(L, dtype=complex)


def _eigensystem(L):
    return L.eigensystem if isinstance(L, Liouvillian) else numerics.eig_decompose(_matrix(L))


def steady_state(L):
    """Unique stationary density operator of ``L``."""
    m = _matrix(L)
    _, sv, vh = np.linalg.svd(m)
    scale = max(sv[0], 1e-300)
    if sv[-2] <= 1e-10 * scale:
        raise SteadyStateError(
            "kernel of the generator is degenerate; no unique steady state "
            "(is the emission rate gamma zero?)"
        )
    rho = unvec(vh[-1].conj())
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise SteadyStateError("null vector of the generator is traceless")
    rho = rho / tr
    return 0.5 * (rho + rho.conj().T)


def check_density_operator(rho, tol=1e-10):
    rho = np.asarray(rho)
    if not np.allclose(rho, rho.conj().T, atol=tol):
        raise ValueError("density operator is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError("density operator does not have unit trace")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -tol:
        raise ValueError("density operator is not positive semidefinite")


def evolve_density(L, rho0, t_grid):
    """``exp(L t) rho0`` for each ``t``; returns an array of shape ``(n, 2, 2)``."""
    t = np.asarray(t_grid, dtype=float)
    vs = numerics.propagate(_matrix(L), vec(rho0), t, _eigensystem(L))
    out = vs.reshape(-1, 2, 2).transpose(0, 2, 1)
    if t.size and t[0] == 0:
        out[0] = np.asarray(rho0, dtype=complex)
    return out


@dataclass(frozen=True, eq=False)
class CorrelationSeries:
    """Complex correlator samples on an ascending delay grid starting at 0."""

    tau: np.ndarray
    values: np.ndarray
    kind: str
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tau.shape != self.values.shape:
            raise ValueError("tau and values must have equal shapes")
        if self.tau.size and (self.tau[0] != 0 or np.any(np.diff(self.tau) <= 0)):
            raise ValueError("tau grid must start at 0 and increase strictly")


def regression_expsum(L, rho_ss, pre_op, post_op, observable):
    """Exponential-sum form of ``tr(observable exp(L tau)[pre_op rho_ss post_op])``.

    Returns ``(coefficients, exponents)``, or ``None`` if ``L`` is defective.
    """
    es = _eigensystem(L)
    if es.defective:
        return None
    v0 = vec(pre_op @ rho_ss @ post_op)
    obs_row = vec(observable.T)
    coeffs = (obs_row @ es.right_vectors) * (es.left_vectors @ v0)
    return coeffs, es.eigenvalues.copy()


def regression_correlator(L, rho_ss, pre_op, post_op, observable, tau_grid, kind="g0"):
    """Quantum-regression correlator on ``tau_grid``.

    Two-time ``<A(t) B(t+tau)>``: ``pre_op=1, post_op=A, observable=B``.
    Three-operator ``<A(t) B(t+tau) C(t)>``: ``pre_op=C, post_op=A, observable=B``.
    """
    tau = np.asarray(tau_grid, dtype=float)
    terms = regression_expsum(L, rho_ss, pre_op, post_op, observable)
    if terms is not None:
        values = numerics.evaluate_exponential_sum(terms, tau)
    else:
        v0 = vec(pre_op @ rho_ss @ post_op)
        vs = numerics.propagate(_matrix(L), v0, tau, _eigensystem(L))
        values = vs @ vec(observable.T)
    return CorrelationSeries(tau, values, kind)


def expectation(rho, op):
    return complex(np.trace(op @ rho))


def optical_tau_grid(gamma, n_points=2000, tau_min=1e-3, tau_max=None):
    """Zero plus geometric spacing from ``tau_min`` to ``tau_max`` (default ``10/gamma``)."""
    tau_max = 10.0 / gamma if tau_max is None else tau_max
    return np.concatenate([[0.0], np.geomspace(tau_min, tau_max, n_points - 1)])


def merge_grids(*grids):
    merged = np.unique(np.concatenate([np.asarray(g, dtype=float) for g in grids]))
    # drop near-duplicates created by the two sampling schemes
    keep = np.concatenate([[True], np.diff(merged) > 1e-12])
    return merged[keep]

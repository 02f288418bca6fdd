import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polaron_emission import hom
from polaron_emission.dynamics import (
    NUMBER,
    SIGMA,
    SIGMA_DAG,
    CorrelationSeries,
    DriveConfig,
    Liouvillian,
    build_liouvillian,
    expectation,
    steady_state,
)
from polaron_emission.errors import ConfigurationError, UndefinedQuantityError
from polaron_emission.hom import (
    DetectorModel,
    detector_convolved_g2,
    dip_depth_sweep,
    g2_hom,
    hom_pipeline,
    hom_tau_grid,
    hom_terms,
)
from polaron_emission.phonon import PhononEnvironment, polaron_rates

from conftest import GAMMA


def system(env, s):
    drive = DriveConfig.from_saturation(s)
    L = build_liouvillian(drive, polaron_rates(env, drive.omega))
    return L, steady_state(L)


def test_detector_validation():
    with pytest.raises(ConfigurationError):
        DetectorModel(fwhm=0.0)


class TestTerms:
    def test_algebraic_zeros(self, env4):
        L, rho = system(env4, 1.0)
        t = hom_terms(L, rho, np.array([0.0, 1.0]))
        assert abs(t["t1"][0]) < 1e-16
        assert abs(t["t5"][0]) < 1e-16
        assert abs(t["t3"][0]) < 1e-16

    @pytest.mark.parametrize("s", [0.1, 1.0, 10.0])
    def test_long_delay_factorisation(self, env4, s):
        L, rho = system(env4, s)
        n = expectation(rho, NUMBER)
        sig = expectation(rho, SIGMA)
        t = {k: v[-1] for k, v in hom_terms(L, rho, np.array([0.0, 60 / GAMMA])).items()}
        assert t["t1"] == pytest.approx(n * n, abs=1e-12)
        assert t["t2"] == pytest.approx(np.conj(sig) * n, abs=1e-12)
        assert t["t3"] == pytest.approx(np.conj(sig) * n, abs=1e-12)
        assert t["t4"] == pytest.approx(abs(sig) ** 2, abs=1e-12)
        assert t["t5"] == pytest.approx(sig * sig, abs=1e-12)


class TestRawCorrelation:
    @pytest.mark.parametrize("s", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("markovian", [False, True])
    def test_coalescence(self, env4, pc4, s, markovian):
        L, rho = system(env4, s)
        tau = hom_tau_grid(GAMMA, 400.0, pc4)
        raw = g2_hom(L, rho, pc4, tau, markovian)
        assert abs(raw.values[0]) <= 1e-6
        assert raw.values[-1] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("s", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("markovian", [False, True])
    def test_unrescaled_asymptote_is_one(self, env4, pc4, s, markovian):
        L, rho = system(env4, s)
        raw = g2_hom(L, rho, pc4, np.concatenate([pc4.tau, [60 / GAMMA]]), markovian)
        assert raw.info["asymptote"] == pytest.approx(1.0, abs=1e-10)

    def test_zero_drive_undefined(self, env4, pc4):
        drive = DriveConfig(omega=0.0)
        L = build_liouvillian(drive, polaron_rates(env4, 0.0))
        with pytest.raises(UndefinedQuantityError):
            g2_hom(L, steady_state(L), pc4, pc4.tau)

    def test_picosecond_feature(self, env4, pc4):
        L, rho = system(env4, 0.01)
        tau = hom_tau_grid(GAMMA, 400.0, pc4)
        short = tau <= 5.0

        def structure(values):
            # departure from the chord over [0, 5] ps; a smooth optical rise is
            # linear on this window
            v = values[short]
            t = tau[short]
            chord = v[0] + (v[-1] - v[0]) * t / t[-1]
            return np.abs(v - chord).max()

        assert structure(g2_hom(L, rho, pc4, tau, False).values.real) > 1e-3
        assert structure(g2_hom(L, rho, pc4, tau, True).values.real) < 1e-3

    def test_rabi_oscillations(self, pc_free):
        env = PhononEnvironment(alpha=0.0)
        s = 20.0
        L, rho = system(env, s)
        omega = s * GAMMA / np.sqrt(2)
        tau = np.linspace(0, 3000, 30001)
        g2 = g2_hom(L, rho, pc_free, tau).values.real
        peaks = np.flatnonzero((g2[1:-1] > g2[:-2]) & (g2[1:-1] > g2[2:])) + 1
        period = np.median(np.diff(tau[peaks]))
        assert period == pytest.approx(2 * np.pi / omega, rel=0.02)

    @settings(max_examples=15)
    @given(theta=st.floats(0, 2 * np.pi), s=st.floats(0.05, 20))
    def test_invariant_under_emitter_phase(self, env4, pc4, theta, s):
        L, rho = system(env4, s)
        u = np.diag([1.0, np.exp(1j * theta)])
        sup = np.kron(u.conj(), u)
        rotated = Liouvillian(sup @ L.matrix @ np.linalg.inv(sup), L.gamma)
        tau = np.concatenate([pc4.tau[::20], np.geomspace(25, 20000, 60)])
        a = g2_hom(L, rho, pc4, tau).values
        b = g2_hom(rotated, u @ rho @ u.conj().T, pc4, tau).values
        assert np.allclose(a, b, atol=1e-10)


class TestConvolution:
    def test_constant(self):
        tau = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 500)])
        raw = CorrelationSeries(tau, np.ones_like(tau, dtype=complex), "g2_raw")
        conv = detector_convolved_g2(raw, DetectorModel(400.0))
        assert np.allclose(conv.values, 1.0, atol=1e-12)

    def test_narrow_detector(self):
        tau = np.linspace(0, 100, 2001)
        vals = (1 - np.exp(-tau / 20)).astype(complex)
        raw = CorrelationSeries(tau, vals, "g2_raw")
        conv = detector_convolved_g2(raw, DetectorModel(1e-5), spacing=0.05)
        assert np.allclose(conv.values.real, np.interp(conv.tau, tau, vals.real), atol=1e-9)

    def test_short_span_rejected(self):
        tau = np.linspace(0, 1000, 101)
        raw = CorrelationSeries(tau, np.ones(101, dtype=complex), "g2_raw")
        with pytest.raises(ConfigurationError):
            detector_convolved_g2(raw, DetectorModel(400.0))

    def test_zero_slope_at_origin(self, env4):
        res = hom_pipeline(env4, DriveConfig.from_saturation(1.0), DetectorModel())
        v = res.convolved.values.real
        # an even function starts quadratically: the first difference is about
        # a third of the second one
        assert abs(v[1] - v[0]) < 0.5 * abs(v[2] - v[1])


class TestPipeline:
    def test_invariants(self, env4):
        for s in (0.1, 3.0):
            res = hom_pipeline(env4, DriveConfig.from_saturation(s), DetectorModel())
            assert -0.05 <= res.dip_depth <= 1
            assert abs(res.raw.values[0]) <= 1e-6

    def test_markovian_weak_drive(self, env4):
        point = dip_depth_sweep(env4, DriveConfig(), DetectorModel(), [0.01], markovian=True)[0]
        assert point.dip_depth >= 0.98

    def test_markovian_weak_drive_zero_temperature(self):
        env = PhononEnvironment(temperature=0.0)
        point = dip_depth_sweep(env, DriveConfig(), DetectorModel(), [0.01], markovian=True)[0]
        assert point.dip_depth >= 0.98

    def test_decoupled_bath_equals_markovian(self):
        free = PhononEnvironment(alpha=0.0)
        s = [0.1, 1.0, 10.0]
        a = dip_depth_sweep(free, DriveConfig(), DetectorModel(), s)
        b = dip_depth_sweep(free, DriveConfig(), DetectorModel(), s, markovian=True)
        for p, q in zip(a, b):
            assert abs(p.dip_depth - q.dip_depth) < 1e-8

    def test_sweep_validation(self, env4):
        with pytest.raises(ConfigurationError):
            dip_depth_sweep(env4, DriveConfig(), DetectorModel(), [1.0, 0.5])
        with pytest.raises(ConfigurationError):
            dip_depth_sweep(env4, DriveConfig(), DetectorModel(), [0.0, 1.0])

    def test_sweep_continues_after_failure(self, env4, monkeypatch):
        real = hom.hom_pipeline

        def flaky(env, drive, *args, **kwargs):
            if abs(drive.saturation - 1.0) < 1e-9:
                raise UndefinedQuantityError("injected")
            return real(env, drive, *args, **kwargs)

        monkeypatch.setattr(hom, "hom_pipeline", flaky)
        points = dip_depth_sweep(env4, DriveConfig(), DetectorModel(), [0.5, 1.0, 2.0])
        assert [p.s for p in points] == [0.5, 1.0, 2.0]
        assert np.isnan(points[1].dip_depth) and "injected" in points[1].error
        assert np.isfinite(points[0].dip_depth) and np.isfinite(points[2].dip_depth)

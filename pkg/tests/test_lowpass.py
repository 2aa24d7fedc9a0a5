import math

import mpmath
import numpy as np
import pytest

from lcladder.errors import CutError, FitError
from lcladder.ladder import converge, fixed_points
from lcladder.lowpass import (
    LowPassConfig,
    Regime,
    cutoff_frequency,
    highpass_cutoff,
    highpass_params,
    infinite_impedance,
    limit_extrapolation,
    limiting_impedance,
    make_impedances,
    regime_analysis,
)

SQRT3 = math.sqrt(3.0)
BELOW = complex(SQRT3 / 2, 0.5)
ABOVE = complex(0.0, 2.0 * (1.0 + SQRT3 / 2))


def mp_zplus(Z1, Z2, dps=60):
    """Attracting fixed point of z = Z1 + Z2 z / (Z2 + z) at high precision."""
    with mpmath.workdps(dps):
        Z1, Z2 = mpmath.mpc(Z1), mpmath.mpc(Z2)
        w = mpmath.sqrt(1 + 4 * Z2 / Z1)
        if w.real < 0:
            w = -w
        return Z1 * (1 + w) / 2


class TestImpedances:
    def test_lossless_unit(self):
        p = make_impedances(LowPassConfig(1, 1, 1))
        assert p.z1 == 1j and p.z2 == -1j and p.t == -1

    def test_lossless_above(self):
        p = make_impedances(LowPassConfig(1, 1, 4))
        assert p.z1 == 4j and p.z2 == -0.25j and p.t == pytest.approx(-1 / 16)

    def test_lossy_off_cut(self):
        p = make_impedances(LowPassConfig(1, 1, 1, 1e-3, 1e-3))
        assert p.t.imag < 0

    @pytest.mark.parametrize("kw", [dict(L=0, C=1, omega=1), dict(L=1, C=-1, omega=1),
                                    dict(L=1, C=1, omega=0), dict(L=1, C=1, omega=1, r=-1e-3)])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            LowPassConfig(**kw)


class TestCutoff:
    def test_values(self):
        assert cutoff_frequency(1, 1) == 2
        assert cutoff_frequency(4, 1) == 1
        assert cutoff_frequency(2.5e-3, 1e-6) == pytest.approx(40000, rel=1e-12)

    def test_one_plus_4t(self):
        # lossless 1 + 4t = 1 - wc^2 / w^2 by direct substitution
        for w in (0.3, 1.0, 1.9, 2.5, 7.0):
            cfg = LowPassConfig(2.0, 0.5, w)
            t = make_impedances(cfg).t
            assert (1 + 4 * t).real == pytest.approx(1 - cfg.omega_c ** 2 / w ** 2, rel=1e-14)


class TestRegime:
    def test_below_limit(self):
        rep = regime_analysis(LowPassConfig(1, 1, 1, 1e-9, 1e-9))
        assert rep.regime is Regime.BELOW_CUTOFF and rep.A == pytest.approx(3)
        assert abs(rep.z_plus_limit - BELOW) < 1e-15
        assert abs(rep.z_plus_limit - complex(mp_zplus(1e-40 + 1j, 1e-40 - 1j))) < 1e-15

    def test_above_limit(self):
        rep = regime_analysis(LowPassConfig(1, 1, 4))
        assert rep.regime is Regime.ABOVE_CUTOFF and rep.A == pytest.approx(0.75)
        assert abs(rep.z_plus_limit - ABOVE) < 1e-15
        assert abs(rep.z_plus_limit - 3.732051j) < 1e-6
        assert rep.z_plus == pytest.approx(rep.z_plus_limit, rel=1e-15)

    def test_at_cutoff(self):
        rep = regime_analysis(LowPassConfig(1, 1, 2))
        assert rep.regime is Regime.AT_CUTOFF and rep.A == 0
        assert rep.z_plus_limit == 1j and rep.z_plus == 1j

    def test_small_loss_exact(self):
        rep = regime_analysis(LowPassConfig(1, 1, 1, 1e-6, 1e-6))
        ref = complex(mp_zplus(complex(1e-6, 1), complex(1e-6, -1)))
        assert abs(rep.z_plus - ref) < 1e-14
        assert abs(rep.z_plus - BELOW) < 1e-5
        assert rep.z_plus.real > SQRT3 / 2
        assert rep.epsilon_scale > 0

    def test_lossless_below_needs_regularisation(self):
        with pytest.raises(CutError, match="regularised"):
            regime_analysis(LowPassConfig(1, 1, 1))

    def test_json(self):
        doc = regime_analysis(LowPassConfig(1, 1, 4)).to_json()
        assert set(doc) == {"regime", "A", "omega", "omega_c", "z_plus", "z_plus_limit"}
        assert doc["regime"] == "above_cutoff" and doc["omega_c"] == 2


class TestProperties:
    def test_passivity(self):
        rng = np.random.default_rng(7)
        for _ in range(10_000):
            cfg = LowPassConfig(rng.uniform(0.01, 10), rng.uniform(0.01, 10), rng.uniform(0.01, 10),
                                1 - rng.uniform(0, 1), 1 - rng.uniform(0, 1))
            assert regime_analysis(cfg).z_plus.real > 0

    @pytest.mark.parametrize("omega", [0.5, 1.0, 1.5, 3.0, 4.0])
    def test_limit_consistency(self, omega):
        base = LowPassConfig(1, 1, omega)
        lim = limiting_impedance(base)
        s = np.array([1e-3, 1e-4, 1e-5, 1e-6, 1e-7])
        err = np.array([abs(infinite_impedance(make_impedances(base.with_losses(v))) - lim) for v in s])
        K = np.max(err / s)
        assert np.all(err <= K * s * (1 + 1e-12))
        order = np.polyfit(np.log(s), np.log(err), 1)[0]
        assert 0.8 <= order <= 1.2

    def test_continuity_at_cutoff(self):
        wc = 2.0
        left = limiting_impedance(LowPassConfig(1, 1, wc * (1 - 1e-10)))
        right = limiting_impedance(LowPassConfig(1, 1, wc * (1 + 1e-10)))
        assert abs(left - 1j) < 1e-4 and abs(right - 1j) < 1e-4

    @pytest.mark.parametrize("omega", np.linspace(0.05, 1.95, 12))
    def test_below_not_reactive(self, omega):
        lim = limiting_impedance(LowPassConfig(1, 1, omega))
        A = 4 / omega ** 2 - 1
        assert lim.real == pytest.approx(omega / 2 * math.sqrt(A), rel=1e-14)
        assert lim.real > 0

    @pytest.mark.parametrize("omega", np.linspace(2.05, 6, 12))
    def test_above_reactive(self, omega):
        assert limiting_impedance(LowPassConfig(1, 1, omega)).real == 0

    @pytest.mark.parametrize("omega", [0.5, 1.0, 1.7, 3.0])
    def test_iteration_agrees(self, omega):
        cfg = LowPassConfig(1, 1, omega, 1e-3, 1e-3)
        params = make_impedances(cfg)
        res = converge(params.t, (params.z1 + params.z2) / params.z1, tol=1e-12, max_iter=200_000)
        z_iter = params.z1 * res.limit
        assert abs(z_iter - regime_analysis(cfg).z_plus) <= 1e-9


class TestExtrapolation:
    def test_passband(self):
        ex = limit_extrapolation(LowPassConfig(1, 1, 1), [1e-3, 1e-4, 1e-5])
        assert abs(ex.limit - BELOW) <= 1e-6
        assert 0.8 <= ex.order <= 1.2

    def test_stopband(self):
        ex = limit_extrapolation(LowPassConfig(1, 1, 4), [1e-3, 1e-4, 1e-5])
        assert abs(ex.limit - ABOVE) <= 1e-6

    def test_needs_three(self):
        with pytest.raises(ValueError):
            limit_extrapolation(LowPassConfig(1, 1, 1), [1e-3])
        with pytest.raises(ValueError):
            limit_extrapolation(LowPassConfig(1, 1, 1), [1e-5, 1e-4, 1e-3])

    def test_fit_error_on_non_monotone_residuals(self):
        # |z(1e-3) - z(9.9e-4)| is far smaller than |z(9.9e-4) - z(1e-5)|
        with pytest.raises(FitError):
            limit_extrapolation(LowPassConfig(1, 1, 1), [1e-3, 9.9e-4, 1e-5])


class TestHighPass:
    def test_t_on_cut(self):
        p = highpass_params(1, 1, 0, 0, 1)
        assert p.t == pytest.approx(-1)
        with pytest.raises(CutError):
            fixed_points(p.t)
        assert 1 > highpass_cutoff(1, 1)

    def test_evanescent(self):
        p = highpass_params(1, 1, 0, 0, 0.1)
        assert p.t == pytest.approx(-0.01)
        z = infinite_impedance(p)
        assert z.real == 0 and z.imag != 0
        assert 0.1 < highpass_cutoff(1, 1)

    def test_cutoff_is_sign_change(self):
        wc = highpass_cutoff(1, 1)
        assert (1 + 4 * highpass_params(1, 1, 0, 0, wc * 0.99).t).real > 0
        assert (1 + 4 * highpass_params(1, 1, 0, 0, wc * 1.01).t).real < 0

    def test_passive(self):
        for w in np.geomspace(0.01, 100, 50):
            assert infinite_impedance(highpass_params(1, 1, 0.01, 0.01, w)).real > 0

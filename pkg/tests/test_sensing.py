import math

import pytest
from scipy import integrate

from src.domain.exceptions import DomainBoundaryError, ParameterError
from src.domain.value_objects import ModelParams, SignalParams
from src.physics.sensing import (
    w_factor, delta_eff, fisher_info, ld_limit_squeeze, stationary_intensity, quasi_prob,
    quasi_prob_normalizer, sensing_table, reference_note, FORCE_SENSITIVITY_YN_PER_SQRT_I,
)


@pytest.fixture
def unit_params():
    return ModelParams(g_h=1.0, g_c=1.0, gamma_h=1.0, gamma_c=1.0)


class TestSqueezingFactors:
    """Тесты W-фактора и эффективного сигнала"""

    def test_w_factor_in_phase(self):
        expected = math.cosh(2.9) - math.sinh(2.9) / 2
        assert w_factor(1.45, 0.0, 0.0) == pytest.approx(expected)
        assert w_factor(1.45, 0.0, 0.0) == pytest.approx(4.5848, rel=1e-4)

    def test_w_factor_without_squeezing(self):
        assert w_factor(0.0, 0.3, 1.2) == pytest.approx(1.0)

    def test_w_factor_orthogonal_phase(self):
        """ cos(beta - 2 phi) = -1 """
        expected = math.cosh(2.9) + math.sinh(2.9) / 2
        assert w_factor(1.45, math.pi, 0.0) == pytest.approx(expected)

    def test_delta_without_squeezing(self):
        magnitude, phase = delta_eff(SignalParams(0.3, 0.7), 0.0, 0.0)
        assert magnitude == pytest.approx(0.3)
        assert phase == pytest.approx(0.7)

    def test_delta_amplified(self):
        """ phi = pi/2, beta = 0: |delta| = e^r |eps| """
        magnitude, _ = delta_eff(SignalParams(0.2, math.pi / 2), 1.0, 0.0)
        assert magnitude == pytest.approx(0.2 * math.e)


class TestQuasiProbability:
    """Тесты квазивероятности P(I, theta)"""

    def test_stationary_intensity(self, unit_params):
        assert stationary_intensity(unit_params) == pytest.approx(0.25)

    def test_below_threshold_intensity(self):
        p = ModelParams(g_h=0.5, g_c=1.0, gamma_h=1.0, gamma_c=1.0)
        assert stationary_intensity(p) == 0.0

    def test_normalizer(self, unit_params):
        """ Без сигнала N = 2 pi * интеграл exp(-4 I^4 + I^2 / 2) """
        radial, _ = integrate.quad(lambda x: math.exp(-4 * x ** 4 + 0.5 * x ** 2), 0, math.inf)
        normalizer = quasi_prob_normalizer(unit_params, SignalParams(), 0.0, 0.0)
        assert normalizer == pytest.approx(2 * math.pi * radial, rel=1e-6)

    def test_overflow(self, unit_params):
        with pytest.raises(DomainBoundaryError):
            quasi_prob(1.0, -math.pi / 2, unit_params, SignalParams(1000.0, 0.0), 0.0, 0.0)

    def test_negative_intensity(self, unit_params):
        with pytest.raises(ParameterError):
            quasi_prob(-0.1, 0.0, unit_params, SignalParams(), 0.0, 0.0)


class TestFisherInformation:
    """Тесты информации Фишера и таблицы сенсорики"""

    def test_explicit_intensity(self, unit_params):
        report = fisher_info(unit_params, SignalParams(), 0.0, 0.0, intensity=0.5)
        assert report.fisher == pytest.approx(2 * 0.25 / 4)
        assert report.enhancement_vs_unsqueezed == pytest.approx(1.0)
        assert report.heating_penalty == pytest.approx(0.5)

    def test_default_intensity(self, lasing_params):
        report = fisher_info(lasing_params, SignalParams(), 0.0, 0.0)
        a = 2 / 1.5
        assert report.fisher == pytest.approx(2 * 0.5625 ** 2 / a ** 2)

    def test_enhancement(self, unit_params):
        report = fisher_info(unit_params, SignalParams(), 1.45, 0.0, intensity=0.25)
        assert report.enhancement_vs_unsqueezed == pytest.approx(83.08, rel=1e-3)

    def test_below_threshold_gives_zero(self, caplog):
        p = ModelParams(g_h=0.5, g_c=1.0, gamma_h=1.0, gamma_c=3.0)
        assert fisher_info(p, SignalParams(), 0.5, 0.0).fisher == 0.0
        assert any("threshold" in record.message for record in caplog.records)

    def test_negative_squeeze(self, unit_params):
        with pytest.raises(ParameterError):
            fisher_info(unit_params, SignalParams(), -0.1, 0.0, intensity=0.1)

    @pytest.mark.parametrize("eta, expected", [(0.05, 2.9), (0.1, 2.9 - math.log(2)), (0.99, 0.0)])
    def test_ld_limit(self, eta, expected):
        assert ld_limit_squeeze(eta) == pytest.approx(expected)

    def test_ld_limit_range(self):
        with pytest.raises(ParameterError):
            ld_limit_squeeze(0.0)

    def test_table(self, lasing_params, caplog):
        rows = sensing_table(lasing_params, SignalParams(0.1, 0.0), 0.05, [0.0, 1.45, 2.9])
        assert [row["ld_limit_reached"] for row in rows] == [False, False, True]
        assert rows[0]["g_bsb"] == pytest.approx(1.0)
        assert rows[0]["g_rsb"] == pytest.approx(0.0)
        assert rows[1]["w"] == pytest.approx(4.5848, rel=1e-4)
        assert any("Lamb-Dicke" in record.message for record in caplog.records)
        assert rows[0]["note"] == ""
        assert "enhancement ~80" in rows[1]["note"]
        assert "Lamb-Dicke limit" in rows[2]["note"]
        assert all(row["force_sensitivity_yn_per_sqrt_i"] == FORCE_SENSITIVITY_YN_PER_SQRT_I for row in rows)


class TestReferenceNotes:
    """Тесты пометок опубликованных опорных точек"""

    def test_reference_notes(self):
        assert reference_note(1.45, 0.1) == "reference: enhancement ~80; heating penalty ~4.56"
        assert "Lamb-Dicke" in reference_note(2.9, 0.05)
        assert reference_note(2.9, 0.1) == ""
        assert reference_note(1.0, 0.05) == ""

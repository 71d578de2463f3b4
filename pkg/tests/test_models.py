import math

import numpy as np
import pytest

from src.domain.entities import DensityMatrix, HilbertLayout
from src.domain.exceptions import ParameterError
from src.domain.value_objects import ModelParams, ModelSpec, ModelKind, LdOrder
from src.physics.hilbert import embed, squeeze_matrix
from src.physics.lindblad import build_liouvillian, steady_state, trace_distance
from src.physics.models import (
    build_model, two_ion_model, single_ion_model, ld3_two_ion_model, squeezed_model,
    squeezed_mode_operator, squeezed_mode_couplings, effective_coupling, cooperativity,
    _two_ion, MOTION,
)
from src.physics.observables import distribution_from_rho, total_variation, fano, wigner, quadrature_variances
from src.physics.quantum_stats import pn_single_equal_gamma


class TestModelParams:
    """Тесты валидации параметров"""

    def test_negative_decay_rate(self):
        with pytest.raises(ParameterError):
            ModelParams(g_h=1.0, g_c=1.0, gamma_h=-1.0, gamma_c=1.0)

    def test_lamb_dicke_range(self):
        with pytest.raises(ParameterError):
            ModelParams(g_h=1.0, g_c=1.0, gamma_h=1.0, gamma_c=1.0, eta_h=1.2)

    def test_non_finite_value(self):
        with pytest.raises(ParameterError):
            ModelParams(g_h=math.nan, g_c=1.0, gamma_h=1.0, gamma_c=1.0)

    def test_small_truncation(self):
        with pytest.raises(ParameterError):
            ModelSpec(n_max=3)

    def test_cooperativity(self, lasing_params):
        assert cooperativity(lasing_params) == pytest.approx(2.0)


class TestCouplings:
    """Тесты эффективных связей"""

    def test_effective_coupling(self):
        assert effective_coupling(0.1, 2.0) == pytest.approx(0.2 * math.exp(-0.005))

    def test_squeezed_couplings(self):
        assert squeezed_mode_couplings(1.0, 0.0) == (1.0, 0.0)
        bsb, rsb = squeezed_mode_couplings(2.0, 0.5)
        assert bsb ** 2 - rsb ** 2 == pytest.approx(4.0)

    def test_squeezed_mode_commutator(self):
        """ [A, A†] = 1 вдали от границы усечения """
        A = squeezed_mode_operator(12, 0.3, 0.4).dense()
        commutator = A @ A.conj().T - A.conj().T @ A
        assert np.allclose(commutator[:8, :8], np.eye(8))


class TestHamiltonians:
    """Тесты гамильтонианов и операторов скачков"""

    def test_two_ion_layout(self, lasing_params):
        H, jumps = two_ion_model(lasing_params, 6)
        assert H.layout == HilbertLayout((2, 2, 6))
        assert len(jumps) == 2
        assert H.hermiticity_defect() < 1e-14

    def test_single_ion_layout(self, equal_gamma_params):
        H, jumps = single_ion_model(equal_gamma_params, 6)
        assert H.layout == HilbertLayout((3, 6))
        assert len(jumps) == 2

    def test_ld3_reduces_to_first_order(self, lasing_params):
        H1, _ = two_ion_model(lasing_params, 6)
        H3, _ = ld3_two_ion_model(lasing_params, 6)
        assert np.allclose(H1.dense(), H3.dense())

    def test_ld3_zero_coupling_warning(self, caplog):
        p = ModelParams(g_h=1.0, g_c=1.0, gamma_h=1.0, gamma_c=2.0, eta_h=0.5)
        ld3_two_ion_model(p, 12)
        assert any("vanishes" in record.message for record in caplog.records)

    def test_squeezed_sideband_expansion(self):
        """ Разложение по полосам совпадает с прямой подстановкой A """
        p = ModelParams(g_h=0.7, g_c=1.1, gamma_h=1.0, gamma_c=3.0, r=0.4, beta=0.9)
        spec = ModelSpec(kind=ModelKind.TWO_ION, squeezed=True, n_max=8)
        H, _ = squeezed_model(spec, p, 8)
        mode = squeezed_mode_operator(8, p.r, p.beta)
        direct, _ = _two_ion(p, 8, mode, mode)
        assert np.allclose(H.dense(), direct.dense())

    def test_build_model_dispatch(self, equal_gamma_params):
        spec = ModelSpec(kind=ModelKind.SINGLE_ION, ld_order=LdOrder.THIRD, n_max=5)
        H, _ = build_model(spec, equal_gamma_params)
        assert H.layout == HilbertLayout((3, 5))


class TestSteadyStates:
    """Тесты стационарных состояний моделей"""

    def test_two_ion_lasing(self, lasing_params):
        report = steady_state(build_liouvillian(*two_ion_model(lasing_params, 20)))
        assert report.truncation_ok
        assert report.rho.is_valid()
        assert report.nbar > 0.1

    def test_single_ion_matches_recurrence(self, equal_gamma_params):
        """ Распределение Лиувиллиана близко к рекуррентному при равных gamma """
        report = steady_state(build_liouvillian(*single_ion_model(equal_gamma_params, 30)))
        numeric = distribution_from_rho(report.rho)
        analytic = pn_single_equal_gamma(equal_gamma_params)
        assert total_variation(numeric, analytic) < 0.05


class TestLd3SubPoissonian:
    """Тесты суб-пуассоновской статистики в третьем порядке Лэмба-Дике"""

    @staticmethod
    def _solve(point: dict, n_max: int, ld_order: LdOrder):
        spec = ModelSpec(kind=ModelKind.TWO_ION, ld_order=ld_order, n_max=n_max)
        report = steady_state(build_liouvillian(*build_model(spec, ModelParams(**point["params"]))))
        return report, distribution_from_rho(report.rho)

    def test_ld3_is_sub_poissonian(self, ld3_sub_poissonian):
        point = ld3_sub_poissonian["ld3"]
        report, dist = self._solve(point, ld3_sub_poissonian["n_max"], LdOrder.THIRD)
        assert report.truncation_ok
        assert report.nbar >= 5
        assert report.nbar == pytest.approx(point["nbar"], rel=1e-4)
        assert fano(dist) < 0.9
        assert fano(dist) == pytest.approx(point["fano"], rel=1e-3)
        assert report.g2 == pytest.approx(point["g2"], rel=1e-4)

    def test_ld1_is_near_poissonian(self, ld3_sub_poissonian):
        point = ld3_sub_poissonian["ld1"]
        report, dist = self._solve(point, ld3_sub_poissonian["n_max"], LdOrder.FIRST)
        assert report.truncation_ok
        assert 0.9 <= fano(dist) <= 1.1
        assert report.nbar == pytest.approx(point["nbar"], rel=1e-4)

    def test_matched_occupation(self, ld3_sub_poissonian):
        """ Сравнение идет при одинаковом среднем числе фононов """
        n_max = ld3_sub_poissonian["n_max"]
        ld3, _ = self._solve(ld3_sub_poissonian["ld3"], n_max, LdOrder.THIRD)
        ld1, _ = self._solve(ld3_sub_poissonian["ld1"], n_max, LdOrder.FIRST)
        assert ld3.nbar == pytest.approx(ld1.nbar, rel=0.05)


@pytest.mark.slow
class TestSqueezedSteadyState:
    """Стационарное состояние в сжатой моде против S rho S† для несжатой модели"""

    R, N_MAX = 0.8, 100

    def test_matches_squeezed_unsqueezed_state(self, lasing_params):
        squeezed = ModelParams(g_h=1.0, g_c=1.0, gamma_h=1.5, gamma_c=3.0, r=self.R)
        spec = ModelSpec(kind=ModelKind.TWO_ION, squeezed=True, n_max=self.N_MAX)
        report = steady_state(build_liouvillian(*build_model(spec, squeezed)))
        assert report.truncation_ok
        assert report.nbar == pytest.approx(4.207, rel=1e-3)

        plain = steady_state(build_liouvillian(*two_ion_model(lasing_params, self.N_MAX))).rho
        s = embed(squeeze_matrix(self.R, self.N_MAX), MOTION, plain.layout).dense()
        expected = DensityMatrix(plain.layout, s @ plain.entries @ s.conj().T)
        assert trace_distance(report.rho, expected) < 2e-3

        var_re, var_im = quadrature_variances(wigner(report.rho, (-10.0, 10.0), (-10.0, 10.0), 81))
        assert var_re / var_im == pytest.approx(math.exp(-4 * self.R), rel=0.15)

import math

import pytest

from src.application.use_cases import (
    SteadyStateUseCase, SweepUseCase, WignerUseCase, SensingUseCase, MeanFieldUseCase, theory_g2,
)
from src.domain.exceptions import SolverException, ParameterError
from src.domain.value_objects import (
    ModelKind, ModelParams, ModelSpec, SignalParams, SweepAxis, SweepSpec,
)


@pytest.fixture
def lasing_sweep(lasing_params, two_ion_spec):
    return SweepSpec(
        model=two_ion_spec,
        fixed=lasing_params,
        axis1=SweepAxis("g_h", 0.8, 1.2, 2),
        axis2=SweepAxis("gamma_h", 1.2, 1.5, 2),
        outputs=("nbar_mf", "phase"),
    )


class TestSteadyStateUseCase:
    """Тесты отчета по одной точке"""

    async def test_lasing_report(self, metrics_collector, lasing_params, two_ion_spec):
        payload = await SteadyStateUseCase(metrics_collector).execute(two_ion_spec, lasing_params)

        assert payload["model"] == "two-ion"
        assert payload["phase"] == "Lasing"
        assert payload["truncation_ok"]
        assert payload["nbar"] > 0
        assert payload["iss_mean_field"]["value"] == pytest.approx(0.5625)
        assert payload["g2_theory"]["name"] == "two-ion-lowest"
        assert metrics_collector.registry.get_sample_value(
            'phonon_steady_state_solves_total', {'model': 'two-ion'}) == 1.0

    async def test_heating_phase_fails(self, metrics_collector, heating_params):
        """ В фазе нагрева распределение упирается в границу усечения """
        with pytest.raises(SolverException) as excinfo:
            await SteadyStateUseCase(metrics_collector).execute(ModelSpec(n_max=8), heating_params)

        error_type = type(excinfo.value).__name__
        assert metrics_collector.registry.get_sample_value(
            'phonon_errors_total', {'error_type': error_type}) == 1.0

    async def test_single_ion_theory(self, metrics_collector, equal_gamma_params, single_ion_spec):
        payload = await SteadyStateUseCase(metrics_collector).execute(single_ion_spec, equal_gamma_params)
        assert payload["model"] == "single-ion"
        assert payload["g2_theory"]["name"] == "single-equal-gamma"


class TestTheoryG2:
    """Тесты выбора аналитического g2"""

    def test_two_ion_outside_assumptions(self, lasing_params, caplog):
        theory = theory_g2(ModelKind.TWO_ION, lasing_params)
        assert theory["validity"]["violated"]
        assert any("outside its assumptions" in record.message for record in caplog.records)

    def test_single_ion_heating_has_no_theory(self):
        p = ModelParams(g_h=0.8, g_c=0.5, gamma_h=1.0, gamma_c=1.0)
        assert theory_g2(ModelKind.SINGLE_ION, p) is None


class TestSweepUseCase:
    """Тесты сканирования параметров"""

    async def test_grid_order(self, metrics_collector, lasing_sweep):
        header, rows = await SweepUseCase(metrics_collector).execute(lasing_sweep, jobs=1)

        assert header == ["axis1", "axis2", "nbar_mf", "phase", "status"]
        assert len(rows) == 4
        assert [row[0] for row in rows] == pytest.approx([0.8, 0.8, 1.2, 1.2])
        assert [row[1] for row in rows] == pytest.approx([1.2, 1.5, 1.2, 1.5])
        assert all(row[3] == "Lasing" and row[4] == "ok" for row in rows)
        assert metrics_collector.registry.get_sample_value(
            'phonon_sweep_points_total', {'status': 'ok'}) == 4.0

    async def test_jobs_do_not_change_result(self, metrics_collector, lasing_sweep):
        sequential = await SweepUseCase(metrics_collector).execute(lasing_sweep, jobs=1)
        parallel = await SweepUseCase(metrics_collector).execute(lasing_sweep, jobs=2)
        assert sequential == parallel

    async def test_invalid_point_is_flagged(self, metrics_collector, lasing_params, two_ion_spec):
        sweep = SweepSpec(
            model=two_ion_spec,
            fixed=lasing_params,
            axis1=SweepAxis("gamma_h", -1.0, 1.0, 2),
            axis2=SweepAxis("g_c", 1.0, 1.0, 1),
        )
        _, rows = await SweepUseCase(metrics_collector).execute(sweep)
        assert rows[0][-1] == "ParameterError"
        assert math.isnan(rows[0][2])
        assert rows[1][-1] == "ok"

    async def test_unphysical_intensity_is_tagged(self, metrics_collector, lasing_params, two_ion_spec):
        """ Отрицательная интенсивность среднего поля не обрезается до нуля """
        sweep = SweepSpec(
            model=two_ion_spec,
            fixed=lasing_params,
            axis1=SweepAxis("g_h", 0.5, 0.5, 1),
            axis2=SweepAxis("gamma_c", 3.0, 3.0, 1),
        )
        _, rows = await SweepUseCase(metrics_collector).execute(sweep)
        assert rows[0][2] == pytest.approx(-1.125)
        assert rows[0][3] == "Dark"
        assert rows[0][-1] == "unphysical"
        assert metrics_collector.registry.get_sample_value(
            'phonon_sweep_points_total', {'status': 'unphysical'}) == 1.0

    async def test_simulated_outputs(self, metrics_collector, lasing_params, two_ion_spec):
        sweep = SweepSpec(
            model=two_ion_spec,
            fixed=lasing_params,
            axis1=SweepAxis("g_h", 1.0, 1.0, 1),
            axis2=SweepAxis("g_c", 1.0, 1.0, 1),
            outputs=("nbar_sim", "g2_sim", "truncation_ok"),
        )
        header, rows = await SweepUseCase(metrics_collector).execute(sweep)
        assert header[2:] == ["nbar_sim", "g2_sim", "truncation_ok", "status"]
        assert rows[0][2] > 0
        assert rows[0][4] is True

    async def test_invalid_jobs(self, metrics_collector, lasing_sweep):
        with pytest.raises(ParameterError):
            await SweepUseCase(metrics_collector).execute(lasing_sweep, jobs=-1)


class TestSweepPhaseBoundaries:
    """Метки фаз меняются ровно на границах фазовой диаграммы"""

    @staticmethod
    async def _phases(metrics_collector, kind: ModelKind, fixed: ModelParams, axis: SweepAxis,
                      other: str) -> list:
        sweep = SweepSpec(
            model=ModelSpec(kind=kind, n_max=8),
            fixed=fixed,
            axis1=axis,
            axis2=SweepAxis(other, getattr(fixed, other), getattr(fixed, other), 1),
            outputs=("phase",),
        )
        _, rows = await SweepUseCase(metrics_collector).execute(sweep)
        return [row[2] for row in rows]

    async def test_cooperativity_boundary(self, metrics_collector):
        """ kappa_h = kappa_c при g_c = 2 """
        fixed = ModelParams(g_h=1.0, g_c=1.0, gamma_h=1.0, gamma_c=4.0)
        phases = await self._phases(metrics_collector, ModelKind.TWO_ION, fixed,
                                    SweepAxis("g_c", 1.0, 3.0, 3), "g_h")
        assert phases == ["Lasing", "Boundary", "Dark"]

    async def test_decay_rate_boundary(self, metrics_collector):
        """ gamma_h = gamma_c при gamma_h = 2 """
        fixed = ModelParams(g_h=2.0, g_c=1.0, gamma_h=1.0, gamma_c=2.0)
        phases = await self._phases(metrics_collector, ModelKind.TWO_ION, fixed,
                                    SweepAxis("gamma_h", 1.0, 3.0, 3), "g_c")
        assert phases == ["Lasing", "Boundary", "Heating"]

    async def test_single_ion_stability_boundary(self, metrics_collector):
        """ g_h^2 / g_c^2 = gamma_c / gamma_h при g_h = 0.5 """
        fixed = ModelParams(g_h=0.25, g_c=1.0, gamma_h=4.0, gamma_c=1.0)
        phases = await self._phases(metrics_collector, ModelKind.SINGLE_ION, fixed,
                                    SweepAxis("g_h", 0.25, 0.75, 3), "g_c")
        assert phases == ["Dark", "Boundary", "UnstableDark"]


class TestWignerUseCase:
    """Тесты сетки функции Вигнера"""

    async def test_rows(self, metrics_collector, lasing_params, two_ion_spec):
        header, rows = await WignerUseCase(metrics_collector).execute(
            two_ion_spec, lasing_params, (-2.0, 2.0, -2.0, 2.0), 5)
        assert header == ["re", "im", "w"]
        assert len(rows) == 25
        assert rows[0][:2] == [-2.0, -2.0]
        assert rows[1][:2] == [-1.0, -2.0]
        assert all(abs(row[2]) <= 2 / math.pi + 1e-9 for row in rows)


class TestSensingUseCase:
    """Тесты таблицы сенсорики"""

    async def test_table(self, metrics_collector, lasing_params):
        header, rows = await SensingUseCase(metrics_collector).execute(
            lasing_params, SignalParams(0.1, 0.0), 0.05, [0.0, 2.9])
        assert header == list(SensingUseCase.COLUMNS)
        assert len(rows) == 2
        flag = header.index("ld_limit_reached")
        assert rows[0][flag] is False
        assert rows[1][flag] is True
        assert rows[1][header.index("note")].startswith("reference")

    async def test_invalid_eta(self, metrics_collector, lasing_params):
        with pytest.raises(ParameterError):
            await SensingUseCase(metrics_collector).execute(lasing_params, SignalParams(), 1.5, [0.0])
        assert metrics_collector.registry.get_sample_value(
            'phonon_errors_total', {'error_type': 'ParameterError'}) == 1.0


class TestMeanFieldUseCase:
    """Тесты отчета среднего поля"""

    async def test_two_ion_report(self, metrics_collector, lasing_params):
        payload = await MeanFieldUseCase(metrics_collector).execute(ModelKind.TWO_ION, lasing_params)
        assert payload["phase"] == "Lasing"
        assert payload["cooperativity"] == pytest.approx(2.0)
        assert payload["iss_ld1"]["value"] == pytest.approx(0.5625)
        rates = payload["rates_at_iss"]
        assert rates["heating"] == pytest.approx(rates["cooling"])
        assert "validity" in payload

    async def test_boundary_is_reported(self, metrics_collector):
        p = ModelParams(g_h=1.0, g_c=1.0, gamma_h=1.0, gamma_c=1.0)
        payload = await MeanFieldUseCase(metrics_collector).execute(ModelKind.SINGLE_ION, p)
        assert payload["phase"] == "Boundary"
        assert payload["iss_ld1"]["value"] is None
        assert "reason" in payload["iss_ld1"]
        assert "rates_at_iss" not in payload

import asyncio
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, List, Dict, Any, Tuple, Sequence

from src.application.interfaces import AbstractMetricsCollector
from src.config import config
from src.domain.entities import SteadyStateReport, SweepPoint
from src.domain.exceptions import (
    DomainException, SolverException, TruncationError, ParameterError,
)
from src.domain.value_objects import (
    ModelParams, ModelSpec, ModelKind, LdOrder, SweepSpec, SignalParams, IntensityResult, Phase,
)
from src.logconfig import opt_logger as log
from src.physics.lindblad import build_liouvillian, steady_state, steady_state_adaptive
from src.physics.meanfield import (
    classify_two_ion, classify_single_ion, iss_two_ion, iss_single_ion, iss_two_ion_ld3,
    iss_single_ion_ld3, rates_first_order, rates_ld3,
)
from src.physics.models import build_model, cooperativity
from src.physics.observables import wigner, quadrature_variances
from src.physics.quantum_stats import (
    analytic_g2, g2_from_distribution, low_occupation, pn_single_general, two_ion_validity,
)
from src.physics.sensing import sensing_table

logger = log.setup_logger(name="use cases")

Table = Tuple[List[str], List[List[Any]]]


def solve_model(spec: ModelSpec, params: ModelParams,
                adaptive: bool = False) -> Tuple[SteadyStateReport, int]:
    """ Построить модель, Лиувиллиан и стационарное состояние """
    def builder(n_max: int):
        H, jumps = build_model(spec.with_nmax(n_max), params)
        return build_liouvillian(H, jumps)

    if adaptive:
        return steady_state_adaptive(builder, spec.n_max)
    return steady_state(builder(spec.n_max)), spec.n_max


def classify(kind: ModelKind, params: ModelParams) -> Phase:
    if kind is ModelKind.TWO_ION:
        return classify_two_ion(params)
    return classify_single_ion(params)


def mean_field_intensity(kind: ModelKind, params: ModelParams,
                         ld_order: LdOrder = LdOrder.FIRST) -> IntensityResult:
    """ Стационарная интенсивность среднего поля для выбранного варианта """
    if kind is ModelKind.TWO_ION:
        return iss_two_ion_ld3(params) if ld_order is LdOrder.THIRD else iss_two_ion(params)
    return iss_single_ion_ld3(params) if ld_order is LdOrder.THIRD else iss_single_ion(params)


def theory_g2(kind: ModelKind, params: ModelParams) -> Optional[Dict[str, Any]]:
    """ Аналитический g2 с аннотацией нарушенных допущений; None вне области определения """
    try:
        if kind is ModelKind.TWO_ION:
            name = "two-ion-lowest"
            result = analytic_g2(name, params)
            value, validity = result.value, result.validity
        elif params.gamma_h == params.gamma_c:
            name = "single-equal-gamma"
            result = analytic_g2(name, params)
            value, validity = result.value, result.validity
        else:
            name = "single-general"
            value = g2_from_distribution(pn_single_general(params))
            validity = None
    except DomainException as e:
        logger.debug(f"Analytic g2 unavailable: {e}")
        return None

    annotation = validity.to_dict() if validity is not None else {
        "assumptions": ["gamma_h~gamma_c"], "violated": [],
    }
    if annotation["violated"]:
        logger.warning(f"{name} g2 evaluated outside its assumptions: {annotation['violated']}")
    return {"name": name, "value": value, "validity": annotation}


class SteadyStateUseCase:
    """ Use case для отчета по одной точке параметров """

    def __init__(self, metrics_collector: AbstractMetricsCollector):
        self.metrics = metrics_collector

    async def execute(self, spec: ModelSpec, params: ModelParams,
                      adaptive: bool = False) -> Dict[str, Any]:
        """ Решить модель и собрать численные и аналитические величины """
        start_time = time.time()
        try:
            logger.debug(f"Solving {spec.kind.value} model, n_max={spec.n_max}")
            report, n_used = await asyncio.to_thread(solve_model, spec, params, adaptive)
            await self.metrics.record_steady_state(
                spec.kind.value, time.time() - start_time, report.residual,
                report.rho.layout.total_dim, report.truncation_ok,
            )

            if not report.truncation_ok:
                raise TruncationError(
                    f"Tail mass {report.tail_mass:.2e} at n_max={n_used}: the phonon distribution "
                    f"does not saturate, the parameters likely lie in the heating phase",
                    report.tail_mass,
                )

            payload = self._payload(spec, params, report, n_used)
            logger.info(
                f"Steady state solved: nbar={report.nbar:.6g}, phase={payload['phase']}, "
                f"{time.time() - start_time:.2f}s"
            )
            return payload

        except DomainException as e:
            logger.error(f"Exception in SteadyStateUseCase: {e}")
            await self.metrics.record_error(type(e).__name__)
            raise
        except Exception as e:
            logger.error(f"Unexpected exception in SteadyStateUseCase: {e}")
            await self.metrics.record_error("steady_state_error")
            raise SolverException(f"Error solving steady state: {str(e)}")

    @staticmethod
    def _payload(spec: ModelSpec, params: ModelParams, report: SteadyStateReport,
                 n_used: int) -> Dict[str, Any]:
        phase = classify(spec.kind, params)
        try:
            intensity = mean_field_intensity(spec.kind, params, spec.ld_order)
            iss = {"value": intensity.value, "unphysical": intensity.unphysical}
        except DomainException as e:
            iss = {"value": None, "unphysical": True, "reason": str(e)}

        return {
            "model": spec.kind.value,
            "ld_order": spec.ld_order.value,
            "squeezed": spec.squeezed,
            "params": params.to_dict(),
            "n_max": n_used,
            "nbar": report.nbar,
            "g2": report.g2,
            "low_occupation": low_occupation(report.nbar),
            "phase": phase.label.value,
            "boundaries": list(phase.boundaries),
            "iss_mean_field": iss,
            "g2_theory": theory_g2(spec.kind, params),
            "tail_mass": report.tail_mass,
            "truncation_ok": report.truncation_ok,
            "residual": report.residual,
        }


class SweepUseCase:
    """ Use case для двумерного сканирования параметров """

    def __init__(self, metrics_collector: AbstractMetricsCollector):
        self.metrics = metrics_collector

    async def execute(self, sweep: SweepSpec, jobs: int = None) -> Table:
        """
        Посчитать все точки сетки пулом из jobs потоков. Строки
        возвращаются в построчном порядке осей независимо от jobs
        """
        jobs = jobs or config.sweep.jobs
        if jobs < 1:
            raise ParameterError(f"jobs must be >= 1, got {jobs}")
        start_time = time.time()
        points = list(sweep.points())
        logger.debug(f"Sweep of {len(points)} points with {jobs} workers")

        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            futures = [
                loop.run_in_executor(executor, self._evaluate, sweep, i, j, x, y)
                for i, j, x, y in points
            ]
            results: List[SweepPoint] = await asyncio.gather(*futures)

        for point in results:
            await self.metrics.record_sweep_point(point.status)

        header = ["axis1", "axis2", *sweep.outputs, "status"]
        rows = [
            [point.axis1, point.axis2, *(point.values[name] for name in sweep.outputs), point.status]
            for point in results
        ]
        failed = sum(point.status != "ok" for point in results)
        logger.info(f"Sweep finished: {len(rows)} points, {failed} flagged, {time.time() - start_time:.2f}s")
        return header, rows

    @staticmethod
    def _evaluate(sweep: SweepSpec, i: int, j: int, x: float, y: float) -> SweepPoint:
        values: Dict[str, Any] = {name: math.nan for name in sweep.outputs}
        status = "ok"
        try:
            params = sweep.fixed.with_values(**{sweep.axis1.name: x, sweep.axis2.name: y})
        except ParameterError as e:
            logger.debug(f"Point ({i}, {j}) rejected: {e}")
            return SweepPoint((i, j), x, y, values, status=type(e).__name__)

        kind = sweep.model.kind
        for name in sweep.outputs:
            try:
                if name == "phase":
                    values[name] = classify(kind, params).label.value
                elif name == "nbar_mf":
                    result = mean_field_intensity(kind, params, sweep.model.ld_order)
                    values[name] = result.value
                    if result.unphysical and status == "ok":
                        status = "unphysical"
                elif name == "g2_theory":
                    theory = theory_g2(kind, params)
                    values[name] = theory["value"] if theory else math.nan
            except DomainException as e:
                status = type(e).__name__

        if {"nbar_sim", "g2_sim", "truncation_ok"} & set(sweep.outputs):
            try:
                report, _ = solve_model(sweep.model, params)
                values.update({
                    "nbar_sim": report.nbar,
                    "g2_sim": report.g2 if report.g2 is not None else math.nan,
                    "truncation_ok": report.truncation_ok,
                })
                if not report.truncation_ok and status == "ok":
                    status = "truncation"
            except DomainException as e:
                status = type(e).__name__

        values = {name: values[name] for name in sweep.outputs}
        return SweepPoint((i, j), x, y, values, status=status)


class WignerUseCase:
    """ Use case для функции Вигнера стационарного состояния """

    def __init__(self, metrics_collector: AbstractMetricsCollector):
        self.metrics = metrics_collector

    async def execute(self, spec: ModelSpec, params: ModelParams,
                      bounds: Tuple[float, float, float, float] = (-4.0, 4.0, -4.0, 4.0),
                      resolution: int = 41) -> Table:
        start_time = time.time()
        try:
            report, n_used = await asyncio.to_thread(solve_model, spec, params)
            await self.metrics.record_steady_state(
                spec.kind.value, time.time() - start_time, report.residual,
                report.rho.layout.total_dim, report.truncation_ok,
            )
            if not report.truncation_ok:
                raise TruncationError(
                    f"Tail mass {report.tail_mass:.2e} at n_max={n_used}, Wigner grid would be truncated",
                    report.tail_mass,
                )

            re_min, re_max, im_min, im_max = bounds
            grid = await asyncio.to_thread(
                wigner, report.rho, (re_min, re_max), (im_min, im_max), resolution
            )
            var_re, var_im = quadrature_variances(grid)
            logger.info(f"Wigner grid {resolution}x{resolution}: var_re={var_re:.4g}, var_im={var_im:.4g}")

            rows = [
                [float(x), float(y), float(grid.values[i, j])]
                for i, y in enumerate(grid.im_axis)
                for j, x in enumerate(grid.re_axis)
            ]
            return ["re", "im", "w"], rows

        except DomainException as e:
            logger.error(f"Exception in WignerUseCase: {e}")
            await self.metrics.record_error(type(e).__name__)
            raise


class SensingUseCase:
    """ Use case для таблицы сенсорики по параметру сжатия """

    COLUMNS = ("r", "w", "fisher", "enhancement_vs_unsqueezed", "heating_penalty",
               "delta_magnitude", "delta_phase", "g_bsb", "g_rsb", "ld_limit_reached",
               "force_sensitivity_yn_per_sqrt_i", "note")

    def __init__(self, metrics_collector: AbstractMetricsCollector):
        self.metrics = metrics_collector

    async def execute(self, params: ModelParams, signal: SignalParams, eta: float,
                      r_values: Sequence[float], intensity: Optional[float] = None) -> Table:
        try:
            table = sensing_table(params, signal, eta, r_values, intensity)
            rows = [[row[column] for column in self.COLUMNS] for row in table]
            logger.info(f"Sensing table with {len(rows)} squeeze values")
            return list(self.COLUMNS), rows
        except DomainException as e:
            logger.error(f"Exception in SensingUseCase: {e}")
            await self.metrics.record_error(type(e).__name__)
            raise


class MeanFieldUseCase:
    """ Use case для аналитики среднего поля без решения Лиувиллиана """

    def __init__(self, metrics_collector: AbstractMetricsCollector):
        self.metrics = metrics_collector

    async def execute(self, kind: ModelKind, params: ModelParams) -> Dict[str, Any]:
        try:
            phase = classify(kind, params)
            payload: Dict[str, Any] = {
                "model": kind.value,
                "params": params.to_dict(),
                "phase": phase.label.value,
                "boundaries": list(phase.boundaries),
                "cooperativity": cooperativity(params),
            }
            for order in (LdOrder.FIRST, LdOrder.THIRD):
                key = f"iss_ld{order.value}"
                try:
                    result = mean_field_intensity(kind, params, order)
                    payload[key] = {"value": result.value, "unphysical": result.unphysical}
                except DomainException as e:
                    payload[key] = {"value": None, "unphysical": True, "reason": str(e)}

            first = payload["iss_ld1"]
            if first["value"] is not None and not first["unphysical"] and math.isfinite(first["value"]):
                r_h, r_c = rates_first_order(params, first["value"])
                payload["rates_at_iss"] = {"heating": r_h, "cooling": r_c}
            third = payload["iss_ld3"]
            if third["value"] is not None and not third["unphysical"] and math.isfinite(third["value"]):
                r_h, r_c = rates_ld3(params, third["value"])
                payload["rates_at_iss_ld3"] = {"heating": r_h, "cooling": r_c}

            if kind is ModelKind.TWO_ION:
                validity = two_ion_validity(params)
                payload["validity"] = validity.to_dict()
            logger.info(f"Mean-field report: phase={payload['phase']}")
            return payload

        except DomainException as e:
            logger.error(f"Exception in MeanFieldUseCase: {e}")
            await self.metrics.record_error(type(e).__name__)
            raise

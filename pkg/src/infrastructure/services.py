import csv
import io
import json
import math
import time
from pathlib import Path
from typing import Optional, List, Dict, Any, Sequence

from prometheus_client import Counter, Gauge, Histogram, CONTENT_TYPE_LATEST, CollectorRegistry, generate_latest

from src.application.interfaces import AbstractMetricsCollector, AbstractResultWriter
from src.config import config
from src.logconfig import opt_logger as log

logger = log.setup_logger(name='services')


class PrometheusMetricsCollector(AbstractMetricsCollector):
    """
    Сборщик метрик вычислений в собственном реестре Prometheus.
    Текст метрик выгружается командой CLI по флагу --metrics-out
    """

    def __init__(self):
        self.registry = CollectorRegistry()
        self._init_metrics()

    def _init_metrics(self):
        """ Инициализировать все метрики """

        self.steady_state_solves_total = Counter(
            'phonon_steady_state_solves_total',
            'Total number of steady-state solves',
            ['model'],
            registry=self.registry
        )

        self.steady_state_duration = Histogram(
            'phonon_steady_state_duration_seconds',
            'Wall time of a steady-state solve',
            buckets=(0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 60.0, 300.0),
            registry=self.registry
        )

        self.steady_state_residual = Histogram(
            'phonon_steady_state_residual',
            'Max-norm residual of the steady-state solve',
            buckets=(1e-15, 1e-13, 1e-11, 1e-9, 1e-7),
            registry=self.registry
        )

        self.truncation_failures_total = Counter(
            'phonon_truncation_failures_total',
            'Steady states whose top Fock levels hold too much population',
            ['model'],
            registry=self.registry
        )

        self.liouvillian_dimension = Gauge(
            'phonon_liouvillian_dimension',
            'Hilbert-space dimension of the last solved model',
            registry=self.registry
        )

        self.sweep_points_total = Counter(
            'phonon_sweep_points_total',
            'Sweep points by status',
            ['status'],
            registry=self.registry
        )

        self.errors_total = Counter(
            'phonon_errors_total',
            'Total number of errors by type',
            ['error_type'],
            registry=self.registry
        )

    async def record_steady_state(
            self,
            model: str,
            duration: float,
            residual: float,
            dimension: int,
            truncation_ok: bool
    ) -> None:
        """
        Записать решение стационарного состояния
        :param model: Тип модели
        :param duration: Время решения в секундах
        :param residual: Невязка решения
        :param dimension: Размерность гильбертова пространства
        :param truncation_ok: Достаточно ли усечение
        """
        try:
            self.steady_state_solves_total.labels(model=model).inc()
            self.steady_state_duration.observe(duration)
            if math.isfinite(residual):
                self.steady_state_residual.observe(residual)
            self.liouvillian_dimension.set(dimension)
            if not truncation_ok:
                self.truncation_failures_total.labels(model=model).inc()

        except Exception as e:
            logger.error(f"Error recording steady-state metrics: {e}")
            raise

    async def record_sweep_point(self, status: str) -> None:
        try:
            self.sweep_points_total.labels(status=status).inc()
        except Exception as e:
            logger.error(f"Error recording sweep point: {e}")

    async def record_error(self, error_type: str) -> None:
        try:
            self.errors_total.labels(error_type=error_type).inc()
        except Exception as e:
            logger.error(f"Error recording error metrics: {e}")

    async def get_metrics(self) -> Dict[str, Any]:
        """ Текущие метрики в текстовом формате Prometheus """
        return {
            'prometheus_metrics': generate_latest(self.registry).decode('utf-8'),
            'content_type': CONTENT_TYPE_LATEST,
            'timestamp': time.time()
        }


def format_value(value: Any) -> str:
    """ Ячейка таблицы: числа с фиксированным числом значащих цифр """
    if value is None:
        return "NaN"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        if isinstance(value, float) and math.isnan(value):
            return "NaN"
        return f"{value:.{config.sweep.precision}g}"
    return str(value)


def json_safe(value: Any) -> Any:
    """ NaN и бесконечности заменяются на null, numpy-скаляры на float """
    if isinstance(value, dict):
        return {key: json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _emit(text: str, out: Optional[str]) -> str:
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Results written to {out}")
    return text


class CsvResultWriter(AbstractResultWriter):
    """ Таблицы в CSV; отчеты как пары key,value """

    async def write_table(self, header: Sequence[str], rows: List[Sequence[Any]],
                          out: Optional[str] = None) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"Row of {len(row)} cells does not match header of {len(header)}")
            writer.writerow([format_value(cell) for cell in row])
        return _emit(buffer.getvalue(), out)

    async def write_report(self, payload: Dict[str, Any], out: Optional[str] = None) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in _flatten(payload):
            writer.writerow([key, format_value(value)])
        return _emit(buffer.getvalue(), out)


def _flatten(payload: Dict[str, Any], prefix: str = ""):
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, f"{name}.")
        elif isinstance(value, (list, tuple)):
            yield name, ";".join(str(item) for item in value)
        else:
            yield name, value


class JsonResultWriter(AbstractResultWriter):
    """ JSON с номером версии схемы """

    async def write_table(self, header: Sequence[str], rows: List[Sequence[Any]],
                          out: Optional[str] = None) -> str:
        document = {
            "schema_version": config.sweep.schema_version,
            "columns": list(header),
            "rows": [dict(zip(header, row)) for row in rows],
        }
        return _emit(json.dumps(json_safe(document), indent=2), out)

    async def write_report(self, payload: Dict[str, Any], out: Optional[str] = None) -> str:
        document = {"schema_version": config.sweep.schema_version, **payload}
        return _emit(json.dumps(json_safe(document), indent=2), out)

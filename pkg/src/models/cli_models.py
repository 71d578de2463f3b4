from typing import Optional, List, Dict, Any, Literal

from pydantic import BaseModel, Field, ConfigDict, field_validator

from src.domain.exceptions import ParameterError
from src.domain.value_objects import (
    ModelParams, ModelSpec, ModelKind, LdOrder, SweepAxis, SweepSpec, SignalParams, SWEEP_OUTPUTS,
)

# оси по связям и скоростям распада по умолчанию логарифмические
LOG_DEFAULT_PREFIXES = ("g_", "gamma_")


class SweepAxisModel(BaseModel):
    """ Ось сканирования в форме NAME:MIN:MAX:COUNT[:log|lin] """
    name: str = Field(..., description="Имя параметра ModelParams")
    start: float = Field(..., description="Начало оси")
    stop: float = Field(..., description="Конец оси")
    count: int = Field(..., ge=1, description="Число точек")
    scale: Literal["lin", "log"] = Field(..., description="Шкала оси")

    @classmethod
    def parse(cls, text: str) -> 'SweepAxisModel':
        parts = text.split(":")
        if len(parts) not in (4, 5):
            raise ParameterError(f"Axis '{text}' must look like NAME:MIN:MAX:COUNT[:log|lin]")
        name = parts[0]
        scale = parts[4] if len(parts) == 5 else (
            "log" if name.startswith(LOG_DEFAULT_PREFIXES) else "lin"
        )
        try:
            return cls(name=name, start=float(parts[1]), stop=float(parts[2]),
                       count=int(parts[3]), scale=scale)
        except ValueError as e:
            raise ParameterError(f"Invalid axis '{text}': {e}")

    def to_axis(self) -> SweepAxis:
        return SweepAxis(self.name, self.start, self.stop, self.count, self.scale)


class RunConfigModel(BaseModel):
    """ Конфигурация запуска: JSON-файл --config, поверх которого применяются флаги """
    model_config = ConfigDict(extra="forbid")

    model: Literal["two-ion", "single-ion"] = Field("two-ion", description="Тип лазера")
    gh: Optional[float] = Field(None, description="Связь нагревающего иона g_h")
    gc: Optional[float] = Field(None, description="Связь охлаждающего иона g_c")
    gamma_h: Optional[float] = Field(None, description="Скорость распада gamma_h")
    gamma_c: Optional[float] = Field(None, description="Скорость распада gamma_c")
    eta_h: float = Field(0.0, description="Параметр Лэмба-Дике нагрева")
    eta_c: float = Field(0.0, description="Параметр Лэмба-Дике охлаждения")
    r: float = Field(0.0, description="Модуль сжатия")
    beta: float = Field(0.0, description="Фаза сжатия")
    nmax: int = Field(32, description="Усечение пространства Фока")
    ld_order: Literal[1, 3] = Field(1, description="Порядок Лэмба-Дике")
    squeezed: bool = Field(False, description="Модель в сжатом базисе")
    adaptive: bool = Field(False, description="Удваивать nmax до достаточного усечения")
    out: Optional[str] = Field(None, description="Файл результата")
    format: Optional[Literal["csv", "json"]] = Field(None, description="Формат вывода; по умолчанию json для отчетов и csv для таблиц")
    jobs: int = Field(1, ge=1, description="Число потоков сканирования")
    metrics_out: Optional[str] = Field(None, description="Файл метрик Prometheus")

    axis1: Optional[str] = Field(None, description="Первая ось сканирования")
    axis2: Optional[str] = Field(None, description="Вторая ось сканирования")
    outputs: List[str] = Field(default_factory=lambda: ["nbar_mf", "phase"], description="Колонки сканирования")

    re_min: float = Field(-4.0, description="Левая граница Re(alpha)")
    re_max: float = Field(4.0, description="Правая граница Re(alpha)")
    im_min: float = Field(-4.0, description="Нижняя граница Im(alpha)")
    im_max: float = Field(4.0, description="Верхняя граница Im(alpha)")
    resolution: int = Field(41, ge=2, description="Число узлов сетки по каждой оси")

    signal_amplitude: float = Field(0.0, ge=0, description="Модуль сигнала |eps|")
    signal_phase: float = Field(0.0, description="Фаза сигнала phi")
    eta: float = Field(0.05, description="Параметр Лэмба-Дике для предела сжатия")
    intensity: Optional[float] = Field(None, description="Интенсивность лазера I")
    r_values: List[float] = Field(default_factory=lambda: [0.0, 0.5, 1.0, 1.45, 2.0, 2.9],
                                  description="Значения r для таблицы сенсорики")

    @field_validator("outputs")
    @classmethod
    def _known_outputs(cls, value: List[str]) -> List[str]:
        unknown = [name for name in value if name not in SWEEP_OUTPUTS]
        if unknown:
            raise ValueError(f"Unknown outputs {unknown}, expected a subset of {SWEEP_OUTPUTS}")
        return value

    def merged(self, overrides: Dict[str, Any]) -> 'RunConfigModel':
        """ Флаги командной строки (не None) поверх значений файла """
        data = self.model_dump()
        data.update({key: value for key, value in overrides.items() if value is not None})
        return RunConfigModel.model_validate(data)

    def missing_params(self) -> List[str]:
        flags = {"gh": "--gh", "gc": "--gc", "gamma_h": "--gamma-h", "gamma_c": "--gamma-c"}
        return [flag for key, flag in flags.items() if getattr(self, key) is None]

    def to_params(self) -> ModelParams:
        missing = self.missing_params()
        if missing:
            raise ParameterError(f"Missing required parameters: {', '.join(missing)}")
        return ModelParams(
            g_h=self.gh, g_c=self.gc, gamma_h=self.gamma_h, gamma_c=self.gamma_c,
            eta_h=self.eta_h, eta_c=self.eta_c, r=self.r, beta=self.beta,
        )

    def to_spec(self) -> ModelSpec:
        return ModelSpec(
            kind=ModelKind(self.model), ld_order=LdOrder(self.ld_order),
            squeezed=self.squeezed, n_max=self.nmax,
        )

    def to_signal(self) -> SignalParams:
        return SignalParams(self.signal_amplitude, self.signal_phase)

    def to_sweep(self) -> SweepSpec:
        if self.axis1 is None or self.axis2 is None:
            raise ParameterError("sweep requires --axis1 and --axis2")
        return SweepSpec(
            model=self.to_spec(),
            fixed=self.to_params(),
            axis1=SweepAxisModel.parse(self.axis1).to_axis(),
            axis2=SweepAxisModel.parse(self.axis2).to_axis(),
            outputs=tuple(self.outputs),
        )


class CommandResult(BaseModel):
    """ Итог выполнения команды CLI """
    command: str = Field(..., description="Имя подкоманды")
    exit_code: int = Field(..., description="Код возврата")
    output: str = Field("", description="Сериализованный результат")
    error: Optional[str] = Field(None, description="Сообщение об ошибке")

import math
from dataclasses import dataclass, field, replace, asdict
from enum import Enum
from typing import Tuple, Dict, Any

from src.domain.exceptions import ParameterError, SeriesConvergenceError


class ModelKind(Enum):
    """Тип лазера: два иона либо один трехуровневый ион"""
    TWO_ION = "two-ion"
    SINGLE_ION = "single-ion"


class LdOrder(Enum):
    """Порядок разложения Лэмба-Дике"""
    FIRST = 1
    THIRD = 3


class PhaseLabel(Enum):
    """Метки фазовой диаграммы"""
    DARK = "Dark"
    LASING = "Lasing"
    HEATING = "Heating"
    UNSTABLE_DARK = "UnstableDark"
    BOUNDARY = "Boundary"


class G2Limit(Enum):
    """Предельные режимы g2 одноионного лазера"""
    COOLING_OVERDAMPED = "gc<<gamma"
    WEAK_HEATING = "gh<<gamma"
    STRONG_DRIVE = "gamma<<g"


PARAM_NAMES = ("g_h", "g_c", "gamma_h", "gamma_c", "eta_h", "eta_c", "r", "beta")


@dataclass(frozen=True)
class ModelParams:
    """ Физические параметры одной конфигурации лазера """
    g_h: float
    g_c: float
    gamma_h: float
    gamma_c: float
    eta_h: float = 0.0
    eta_c: float = 0.0
    r: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        for name in PARAM_NAMES:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParameterError(f"{name} must be a finite real number, got {value!r}")

        if self.g_h < 0 or self.g_c < 0:
            raise ParameterError("Couplings g_h, g_c must be non-negative")
        if self.gamma_h <= 0 or self.gamma_c <= 0:
            raise ParameterError("Decay rates gamma_h, gamma_c must be positive")
        if not (0 <= self.eta_h < 1) or not (0 <= self.eta_c < 1):
            raise ParameterError("Lamb-Dicke parameters must lie in [0, 1)")
        if self.r < 0:
            raise ParameterError("Squeeze magnitude r must be non-negative")

    @property
    def kappa_h(self) -> float:
        return self.g_h ** 2 / self.gamma_h

    @property
    def kappa_c(self) -> float:
        return self.g_c ** 2 / self.gamma_c

    def with_values(self, **changes) -> 'ModelParams':
        """ Копия с измененными полями (валидация повторяется) """
        unknown = set(changes) - set(PARAM_NAMES)
        if unknown:
            raise ParameterError(f"Unknown parameters: {sorted(unknown)}")
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ModelSpec:
    """ Выбор варианта модели """
    kind: ModelKind = ModelKind.TWO_ION
    ld_order: LdOrder = LdOrder.FIRST
    squeezed: bool = False
    n_max: int = 32

    def __post_init__(self):
        if not isinstance(self.n_max, int) or self.n_max < 4:
            raise ParameterError(f"n_max must be an integer >= 4, got {self.n_max!r}")

    def with_nmax(self, n_max: int) -> 'ModelSpec':
        return replace(self, n_max=n_max)


@dataclass(frozen=True)
class SignalParams:
    """ Комплексная амплитуда внешнего сигнала eps = |eps| e^{i phi} """
    amplitude: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ParameterError("Signal amplitude must be non-negative")

    @property
    def complex_value(self) -> complex:
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class Phase:
    """ Фаза лазера; на границе label=BOUNDARY, а boundaries перечисляет многообразия """
    label: PhaseLabel
    boundaries: Tuple[str, ...] = ()

    @property
    def on_boundary(self) -> bool:
        return self.label is PhaseLabel.BOUNDARY


@dataclass(frozen=True)
class IntensityResult:
    """ Стационарная интенсивность; отрицательные значения помечаются, а не обрезаются """
    value: float
    unphysical: bool = False

    @classmethod
    def tagged(cls, value: float) -> 'IntensityResult':
        return cls(value=value, unphysical=value < 0 or not math.isfinite(value))


@dataclass(frozen=True)
class ValidityDomain:
    """ Допущения аналитического результата и те из них, что нарушены """
    assumptions: Tuple[str, ...] = ()
    violated: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violated

    def to_dict(self) -> Dict[str, Any]:
        return {"assumptions": list(self.assumptions), "violated": list(self.violated)}


@dataclass(frozen=True)
class AnalyticResult:
    """ Значение аналитической формулы вместе с областью применимости """
    value: float
    validity: ValidityDomain = field(default_factory=ValidityDomain)


@dataclass(frozen=True)
class HypergeometricArgs:
    """ Параметры обобщенного гипергеометрического ряда pFq """
    upper: Tuple[float, ...]
    lower: Tuple[float, ...]
    z: float

    def __post_init__(self):
        if not abs(self.z) < 1:
            raise SeriesConvergenceError(f"Series evaluation requires |z| < 1, got z={self.z}")
        for b in self.lower:
            if b <= 0 and float(b).is_integer():
                raise SeriesConvergenceError(f"Lower parameter {b} is a non-positive integer")


@dataclass(frozen=True)
class SeriesResult:
    """ Сумма ряда и признак сходимости """
    value: float
    converged: bool
    terms: int


SWEEP_OUTPUTS = ("nbar_sim", "nbar_mf", "g2_sim", "g2_theory", "phase", "truncation_ok")


@dataclass(frozen=True)
class SweepAxis:
    """ Ось сканирования: параметр, границы, число точек и шкала """
    name: str
    start: float
    stop: float
    count: int
    scale: str = "lin"

    def __post_init__(self):
        if self.name not in PARAM_NAMES:
            raise ParameterError(f"Unknown sweep parameter '{self.name}', expected one of {PARAM_NAMES}")
        if self.count < 1:
            raise ParameterError("Sweep axis needs at least one point")
        if self.scale not in ("lin", "log"):
            raise ParameterError(f"Axis scale must be 'lin' or 'log', got '{self.scale}'")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ParameterError("Log-scale axis bounds must be positive")

    def values(self) -> Tuple[float, ...]:
        if self.count == 1:
            return (float(self.start),)
        if self.scale == "log":
            ratio = (self.stop / self.start) ** (1 / (self.count - 1))
            return tuple(self.start * ratio ** k for k in range(self.count))
        step = (self.stop - self.start) / (self.count - 1)
        return tuple(self.start + step * k for k in range(self.count))


@dataclass(frozen=True)
class SweepSpec:
    """ Двумерное сканирование вокруг фиксированной точки параметров """
    model: ModelSpec
    fixed: ModelParams
    axis1: SweepAxis
    axis2: SweepAxis
    outputs: Tuple[str, ...] = ("nbar_mf", "phase")

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ParameterError(f"Sweep axes must differ, both are '{self.axis1.name}'")
        unknown = [name for name in self.outputs if name not in SWEEP_OUTPUTS]
        if unknown or not self.outputs:
            raise ParameterError(f"Unknown sweep outputs {unknown}, expected a subset of {SWEEP_OUTPUTS}")

    def points(self):
        """ (i, j, x, y) в построчном порядке """
        for i, x in enumerate(self.axis1.values()):
            for j, y in enumerate(self.axis2.values()):
                yield i, j, x, y

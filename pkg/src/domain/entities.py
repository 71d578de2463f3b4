from dataclasses import dataclass, field
from typing import Tuple, Callable, Optional, Union, Dict, Any

import numpy as np
import scipy.sparse as sp

from src.domain.exceptions import LayoutMismatchError, ParameterError, DistributionError

MatrixLike = Union[np.ndarray, sp.spmatrix]


@dataclass(frozen=True)
class HilbertLayout:
    """Тензорное разбиение пространства, например (2, 2, N) или (3, N)"""
    factors: Tuple[int, ...]

    def __post_init__(self):
        if not self.factors:
            raise ParameterError("Layout needs at least one factor")
        for d in self.factors:
            if int(d) != d or d < 2:
                raise ParameterError(f"Every factor dimension must be an integer >= 2, got {d}")

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.factors))

    @property
    def motional_dim(self) -> int:
        # движение всегда последний сомножитель
        return self.factors[-1]

    def concat(self, other: 'HilbertLayout') -> 'HilbertLayout':
        return HilbertLayout(self.factors + other.factors)


@dataclass
class OperatorMatrix:
    """Оператор на усеченном тензорном пространстве (dense или sparse)"""
    layout: HilbertLayout
    entries: MatrixLike

    def __post_init__(self):
        d = self.layout.total_dim
        if self.entries.shape != (d, d):
            raise LayoutMismatchError(
                f"Matrix shape {self.entries.shape} does not match layout dim {d}"
            )

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.entries)

    def dense(self) -> np.ndarray:
        if self.is_sparse:
            return self.entries.toarray()
        return np.asarray(self.entries)

    def sparse(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.entries)

    def dag(self) -> 'OperatorMatrix':
        return OperatorMatrix(self.layout, self.entries.conj().T)

    def _check(self, other: 'OperatorMatrix'):
        if self.layout != other.layout:
            raise LayoutMismatchError(f"{self.layout.factors} != {other.layout.factors}")

    def __matmul__(self, other: 'OperatorMatrix') -> 'OperatorMatrix':
        self._check(other)
        return OperatorMatrix(self.layout, self.entries @ other.entries)

    def __add__(self, other: 'OperatorMatrix') -> 'OperatorMatrix':
        self._check(other)
        return OperatorMatrix(self.layout, self.entries + other.entries)

    def __sub__(self, other: 'OperatorMatrix') -> 'OperatorMatrix':
        self._check(other)
        return OperatorMatrix(self.layout, self.entries - other.entries)

    def __mul__(self, scalar: complex) -> 'OperatorMatrix':
        return OperatorMatrix(self.layout, self.entries * scalar)

    __rmul__ = __mul__

    def hermiticity_defect(self) -> float:
        diff = self.entries - self.entries.conj().T
        if sp.issparse(diff):
            return float(abs(diff).max()) if diff.nnz else 0.0
        return float(np.max(np.abs(diff))) if diff.size else 0.0


@dataclass
class DensityMatrix:
    """Матрица плотности: эрмитова, единичный след, неотрицательна в пределах допуска"""
    layout: HilbertLayout
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        d = self.layout.total_dim
        if self.entries.shape != (d, d):
            raise LayoutMismatchError(
                f"Density matrix shape {self.entries.shape} does not match layout dim {d}"
            )

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def violations(self, herm_tol: float = 1e-10, trace_tol: float = 1e-10,
                   eig_tol: float = 1e-8) -> Dict[str, float]:
        """ Нарушенные инварианты: имя -> величина нарушения """
        out = {}
        herm = float(np.max(np.abs(self.entries - self.entries.conj().T)))
        if herm > herm_tol:
            out["hermiticity"] = herm
        trace_err = abs(self.trace - 1.0)
        if trace_err > trace_tol:
            out["trace"] = trace_err
        min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (self.entries + self.entries.conj().T))))
        if min_eig < -eig_tol:
            out["positivity"] = min_eig
        return out

    def is_valid(self, **tols) -> bool:
        return not self.violations(**tols)

    def vec(self) -> np.ndarray:
        # векторизация по столбцам
        return self.entries.reshape(-1, order="F")

    @classmethod
    def from_vec(cls, layout: HilbertLayout, vector: np.ndarray) -> 'DensityMatrix':
        d = layout.total_dim
        return cls(layout, np.asarray(vector).reshape((d, d), order="F"))

    @classmethod
    def pure(cls, layout: HilbertLayout, state: np.ndarray) -> 'DensityMatrix':
        state = np.asarray(state, dtype=complex)
        state = state / np.linalg.norm(state)
        return cls(layout, np.outer(state, state.conj()))


@dataclass
class Liouvillian:
    """Супероператор d^2 x d^2, действующий на векторизованные матрицы плотности"""
    layout: HilbertLayout
    matrix: sp.csr_matrix

    @property
    def dim(self) -> int:
        return self.layout.total_dim


@dataclass
class SteadyStateReport:
    """Стационарное состояние с наблюдаемыми и диагностикой усечения"""
    rho: DensityMatrix
    nbar: float
    g2: Optional[float]
    tail_mass: float
    truncation_ok: bool
    residual: float

    @property
    def n_max(self) -> int:
        return self.rho.layout.motional_dim


@dataclass
class PhononDistribution:
    """Распределение заселенностей p(0..N)"""
    p: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if self.p.ndim != 1 or self.p.size < 2:
            raise ParameterError("Distribution needs at least two levels")
        if np.any(self.p < -1e-14):
            raise ParameterError("Occupation probabilities must be non-negative")
        total = float(np.sum(self.p))
        if abs(total - 1.0) > 1e-10:
            raise DistributionError(f"Distribution sums to {total}, expected 1")

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.p.size)

    @property
    def mean(self) -> float:
        return float(np.dot(self.levels, self.p))

    @property
    def variance(self) -> float:
        n = self.levels
        return float(np.dot(n * n, self.p)) - self.mean ** 2

    @property
    def tail_mass(self) -> float:
        return float(self.p[-1] + self.p[-2])


@dataclass
class RecurrenceRates:
    """Рекуррентные скорости: gain f1(n) и loss f2(n)"""
    gain: Callable[[int], float]
    loss: Callable[[int], float]


@dataclass(frozen=True)
class LevelRateSample:
    """Эффективные коэффициенты уравнения для p(n) на одном уровне"""
    n: int
    gain: float  # коэффициент при p(n-1) в притоке на уровень n
    loss: float  # коэффициент при p(n) в оттоке вниз
    up: float  # коэффициент при p(n) в оттоке вверх
    condition: float


@dataclass
class MeanFieldState:
    """Переменные уравнений среднего поля"""
    a: complex = 0j
    sp_h: complex = 0j
    sp_c: complex = 0j
    sz_h: float = -1.0
    sz_c: float = -1.0
    s21: complex = 0j

    def to_array(self) -> np.ndarray:
        return np.array([self.a, self.sp_h, self.sp_c, self.sz_h, self.sz_c, self.s21], dtype=complex)

    @classmethod
    def from_array(cls, values: np.ndarray) -> 'MeanFieldState':
        a, sp_h, sp_c, sz_h, sz_c, s21 = values
        return cls(complex(a), complex(sp_h), complex(sp_c),
                   float(np.real(sz_h)), float(np.real(sz_c)), complex(s21))

    @property
    def intensity(self) -> float:
        return abs(self.a) ** 2


@dataclass
class WignerGrid:
    """Функция Вигнера W(alpha) на прямоугольной сетке"""
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    resolution: int
    values: np.ndarray = field(repr=False)

    @property
    def re_axis(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.resolution)

    @property
    def im_axis(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.resolution)

    @property
    def cell_area(self) -> float:
        dx = (self.re_max - self.re_min) / (self.resolution - 1)
        dy = (self.im_max - self.im_min) / (self.resolution - 1)
        return dx * dy

    def integral(self) -> float:
        """ Сумма Римана по сетке; values[i, j] соответствует (im_i, re_j) """
        return float(np.sum(self.values) * self.cell_area)

    def boundary_mass(self) -> float:
        v = np.abs(self.values)
        edge = np.sum(v[0, :]) + np.sum(v[-1, :]) + np.sum(v[1:-1, 0]) + np.sum(v[1:-1, -1])
        return float(edge * self.cell_area)


@dataclass
class SensingReport:
    """Показатели сенсорики сжатого лазера"""
    w: float
    fisher: float
    enhancement_vs_unsqueezed: float
    heating_penalty: float
    delta_magnitude: float
    delta_phase: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "w": self.w,
            "fisher": self.fisher,
            "enhancement_vs_unsqueezed": self.enhancement_vs_unsqueezed,
            "heating_penalty": self.heating_penalty,
            "delta_magnitude": self.delta_magnitude,
            "delta_phase": self.delta_phase,
        }


@dataclass
class SweepPoint:
    """Результат одной точки сканирования"""
    index: Tuple[int, int]
    axis1: float
    axis2: float
    values: Dict[str, Any]
    status: str = "ok"

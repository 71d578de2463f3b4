import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


@dataclass
class SolverConfig:
    """ Конфигурация решателя стационарного состояния """
    steady_residual_tol: float = float(os.getenv("PHONON_STEADY_TOL", "1e-9"))
    tail_tol: float = float(os.getenv("PHONON_TAIL_TOL", "1e-6"))
    hermitian_tol: float = 1e-10
    positivity_tol: float = float(os.getenv("PHONON_POSITIVITY_TOL", "1e-8"))
    refinement_steps: int = 1
    max_nmax: int = int(os.getenv("PHONON_MAX_NMAX", "256"))
    dense_threshold: int = 256  # размерность, выше которой храним sparse
    squeeze_unitarity_tol: float = 1e-8


@dataclass
class StatsConfig:
    """ Конфигурация рекуррентных распределений """
    distribution_tail_tol: float = 1e-8
    growth_window: int = 50  # уровней подряд с f1/f2 >= 1
    max_levels: int = 1 << 16


@dataclass
class SeriesConfig:
    """ Конфигурация гипергеометрических рядов """
    rel_tol: float = 1e-15
    max_terms: int = 10 ** 6


@dataclass
class MeanFieldConfig:
    """ Конфигурация интегратора среднего поля """
    dt_scale: float = 0.01
    horizon_scale: float = 200.0
    boundary_rtol: float = 1e-9


@dataclass
class SweepConfig:
    """ Конфигурация сканирования параметров """
    jobs: int = int(os.getenv("PHONON_JOBS", "1"))
    precision: int = 9  # значащих цифр в CSV
    schema_version: str = "1.0"


@dataclass
class ToolkitConfig:

    debug: str = os.getenv("DEBUG", "TRUE")
    log_level: str = os.getenv("LOG_LEVEL", "INFO")

    # Конфигурации компонентов
    solver: SolverConfig = None
    stats: StatsConfig = None
    series: SeriesConfig = None
    meanfield: MeanFieldConfig = None
    sweep: SweepConfig = None

    def __post_init__(self):
        if self.solver is None: self.solver = SolverConfig()
        if self.stats is None: self.stats = StatsConfig()
        if self.series is None: self.series = SeriesConfig()
        if self.meanfield is None: self.meanfield = MeanFieldConfig()
        if self.sweep is None: self.sweep = SweepConfig()


config = ToolkitConfig()

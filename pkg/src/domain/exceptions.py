"""
Domain exceptions - исключения вычислительного слоя
"""


class DomainException(Exception):
    """Базовое исключение для domain слоя"""
    pass


class ParameterError(DomainException, ValueError):
    """Некорректные физические параметры или спецификация модели"""
    pass


class LayoutMismatchError(DomainException):
    """Операторы заданы на разных тензорных разбиениях"""
    pass


class NonHermitianError(DomainException):
    """Гамильтониан не эрмитов в пределах допуска"""
    pass


class SolverException(DomainException):
    """Исключения численных решателей"""
    pass


class SteadyStateError(SolverException):
    """Сингулярная факторизация либо невязка выше допуска"""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class PropagationError(SolverException):
    """Неустойчивость шага интегратора"""
    pass


class TruncationError(SolverException):
    """Состояние не помещается в усеченное пространство Фока"""

    def __init__(self, message: str, tail_mass: float = float("nan")):
        super().__init__(message)
        self.tail_mass = tail_mass


class SeriesConvergenceError(DomainException):
    """Гипергеометрический ряд не сошелся или аргумент вне области"""
    pass


class DistributionError(DomainException):
    """Рекуррентное распределение не нормируется (фаза нагрева)"""
    pass


class DomainBoundaryError(DomainException, ZeroDivisionError):
    """Деление на ноль на многообразии порога или границы фаз"""
    pass


class UndefinedObservableError(DomainException):
    """Наблюдаемая не определена при нулевой заселенности"""
    pass


class UnitarityError(SolverException):
    """Матричная экспонента не унитарна в пределах допуска"""
    pass

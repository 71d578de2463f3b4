"""
Гипергеометрические ряды 2F1 и pFq для вещественных аргументов |z| < 1
"""
from typing import Sequence

from src.config import config
from src.domain.exceptions import SeriesConvergenceError
from src.domain.value_objects import HypergeometricArgs, SeriesResult
from src.logconfig import opt_logger as log

logger = log.setup_logger(name='specfun')


def _sum_series(args: HypergeometricArgs) -> SeriesResult:
    """
    Сумма sum_n prod(a_i)_n / prod(b_j)_n * z^n / n! по рекурсии членов
    с компенсированным (Кэхэн) суммированием
    """
    rel_tol = config.series.rel_tol
    total, compensation = 1.0, 0.0
    term = 1.0
    for n in range(config.series.max_terms):
        ratio = args.z / (n + 1)
        for a in args.upper:
            ratio *= a + n
        for b in args.lower:
            ratio /= b + n
        next_term = term * ratio
        if next_term == 0.0:
            return SeriesResult(total, True, n + 1)

        y = next_term - compensation
        t = total + y
        compensation = (t - total) - y
        total = t

        q = max(abs(ratio), abs(args.z))
        # хвост мажорируется геометрическим рядом, как только отношение < 1
        if q < 1 and abs(next_term) * q / (1 - q) <= rel_tol * abs(total):
            return SeriesResult(total, True, n + 2)
        term = next_term

    raise SeriesConvergenceError(
        f"Series {args.upper}/{args.lower} at z={args.z} did not converge "
        f"within {config.series.max_terms} terms"
    )


def hyp2f1(a: float, b: float, c: float, z: float) -> SeriesResult:
    """ Гауссова гипергеометрическая функция 2F1(a, b; c; z) """
    result = _sum_series(HypergeometricArgs((a, b), (c,), z))
    logger.debug(f"2F1({a}, {b}; {c}; {z}) = {result.value} in {result.terms} terms")
    return result


def hyp_pfq(upper: Sequence[float], lower: Sequence[float], z: float) -> SeriesResult:
    """ Обобщенная функция pFq, только сходящийся случай p = q + 1 """
    if len(upper) != len(lower) + 1:
        raise SeriesConvergenceError(
            f"Only p = q + 1 is supported, got p={len(upper)}, q={len(lower)}"
        )
    return _sum_series(HypergeometricArgs(tuple(upper), tuple(lower), z))

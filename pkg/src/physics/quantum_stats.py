"""
Квантовая статистика фононного лазера: стационарные распределения p(n)
из рекуррентных соотношений и аналитические выражения для g2(0)
"""
import math
from functools import lru_cache
from typing import Callable, Dict, Tuple

import numpy as np

from src.config import config
from src.domain.entities import PhononDistribution, RecurrenceRates, LevelRateSample
from src.domain.exceptions import (
    DistributionError, ParameterError, SolverException, UndefinedObservableError, DomainBoundaryError,
)
from src.domain.value_objects import ModelParams, G2Limit, ValidityDomain, AnalyticResult
from src.logconfig import opt_logger as log
from src.physics.specfun import hyp2f1, hyp_pfq

logger = log.setup_logger(name='quantum_stats')

NBAR_FLOOR = 1e-12
# во сколько раз величина должна превосходить другую, чтобы считать "a >> b"
SEPARATION = 4.0
# предел суммы g_c/g_h + gamma_h/gamma_c для двухионных формул g2
JOINT_SEPARATION = 0.4
# при n̄ < 1 численный g2 ниже порога ненадежен
LOW_OCCUPATION = 1.0
MAX_CONDITION = 1e12


# ---------------------------------------------------------------- распределения

def pn_from_rates(rates: RecurrenceRates, n_max: int) -> PhononDistribution:
    """
    p(n) f2(n) = p(n-1) f1(n). Число уровней удваивается, пока хвост
    p(N) + p(N-1) не станет меньше distribution_tail_tol
    """
    settings = config.stats
    if n_max < 2:
        raise ParameterError(f"n_max must be >= 2, got {n_max}")

    log_p = [0.0]
    streak, last_ratio, closed = 0, math.inf, False
    target = n_max
    while True:
        while len(log_p) <= target:
            n = len(log_p)
            if closed:
                log_p.append(-math.inf)
                continue
            gain, loss = rates.gain(n), rates.loss(n)
            if gain <= 0:
                closed = True
                log_p.append(-math.inf)
                continue
            if loss <= 0:
                raise DistributionError(
                    f"Non-positive loss rate {loss:.3e} at level {n}, distribution does not normalize"
                )
            ratio = gain / loss
            # отношение >= 1 и не убывает: распределение растет без границы
            if ratio >= 1 and ratio >= last_ratio * (1 - 1e-3):
                streak += 1
            else:
                streak = 0
            if streak >= settings.growth_window:
                raise DistributionError(
                    f"Gain/loss ratio stays >= 1 over {streak} levels up to n={n}, heating regime"
                )
            last_ratio = ratio
            log_p.append(log_p[-1] + math.log(ratio))

        values = np.array(log_p)
        weights = np.exp(values - np.max(values))
        p = weights / np.sum(weights)
        tail = float(p[-1] + p[-2])
        if tail < settings.distribution_tail_tol:
            logger.debug(f"Distribution accepted with {p.size} levels, tail {tail:.2e}")
            return PhononDistribution(p)
        if target >= settings.max_levels:
            raise DistributionError(
                f"Tail mass {tail:.2e} still above tolerance at {target} levels"
            )
        target = min(2 * target, settings.max_levels)


def g2_from_distribution(dist: PhononDistribution) -> float:
    """ sum n(n-1)p(n) / (sum n p(n))^2 """
    n = dist.levels
    nbar = float(np.dot(n, dist.p))
    if nbar < NBAR_FLOOR:
        raise UndefinedObservableError(f"g2 undefined at nbar={nbar:.3e}")
    return float(np.dot(n * (n - 1), dist.p)) / nbar ** 2


def low_occupation(nbar: float) -> bool:
    return nbar < LOW_OCCUPATION


# ---------------------------------------------------------------- два иона

def two_ion_validity(p: ModelParams) -> ValidityDomain:
    checks = {
        "g_h>>g_c": p.g_h >= SEPARATION * p.g_c,
        "gamma_h<<gamma_c": p.gamma_c >= SEPARATION * p.gamma_h,
        "g_c/g_h+gamma_h/gamma_c<<1": p.g_c <= (JOINT_SEPARATION - p.gamma_h / p.gamma_c) * p.g_h,
    }
    return _domain(checks)


def two_ion_rates(n: int, p: ModelParams) -> Tuple[float, float]:
    """
    (f1, f2): приток на уровень n с уровня n-1 и отток вниз с уровня n
    после адиабатического исключения обоих спинов
    """
    kappa_h = p.g_h ** 2 / p.gamma_h
    saturation_h = p.g_h ** 2 / p.gamma_h ** 2
    cooling = 4 * p.g_c ** 2 * n / (p.gamma_c ** 2 + 8 * p.g_c ** 2 * n)

    gain = 4 * kappa_h * n / (1 + 8 * saturation_h * n) * (1 - cooling)
    loss = cooling * (p.gamma_c - 4 * kappa_h * (n + 1) / (1 + 8 * saturation_h * (n + 1)))
    return gain, loss


def pn_two_ion(p: ModelParams, n_max: int = 64) -> PhononDistribution:
    rates = RecurrenceRates(
        gain=lambda n: two_ion_rates(n, p)[0],
        loss=lambda n: two_ion_rates(n, p)[1],
    )
    return pn_from_rates(rates, n_max)


def two_ion_heating_levels(n: int, n_prime: int, p: ModelParams) -> np.ndarray:
    """
    Стационарные элементы нагревающего спина
    (rho00;nn', rho01;n n'+1, rho10;n+1 n', rho11;n+1 n'+1) при rho_nn' = 1
    """
    g, gamma = p.g_h, p.gamma_h
    s, t = math.sqrt(n + 1), math.sqrt(n_prime + 1)
    delta = n - n_prime
    denominator = gamma ** 4 + 4 * g ** 4 * delta ** 2 + 4 * gamma ** 2 * g ** 2 * (2 + n + n_prime)
    vector = np.array([
        gamma ** 3 + 2 * gamma * g ** 2 * (2 + n + n_prime),
        2j * g * t * (gamma ** 2 - 2 * g ** 2 * delta),
        -2j * g * s * (gamma ** 2 + 2 * g ** 2 * delta),
        4 * gamma * g ** 2 * s * t,
    ], dtype=complex)
    return vector * gamma / denominator


def _two_ion_shorthand(p: ModelParams) -> Tuple[float, float, float]:
    """ (g_h^2/gamma_h^2, g_c^2/gamma_c^2, gamma_h/gamma_c) """
    return p.g_h ** 2 / p.gamma_h ** 2, p.g_c ** 2 / p.gamma_c ** 2, p.gamma_h / p.gamma_c


def g2_two_ion_full(p: ModelParams) -> float:
    """ Полное выражение через 2F1 и 3F2 с аргументом z = gamma_h / (2 gamma_c - gamma_h) """
    if p.gamma_h >= 2 * p.gamma_c:
        raise DomainBoundaryError("Hypergeometric argument leaves the unit disk at gamma_h >= 2 gamma_c")
    if p.g_c == 0 or p.g_h == 0:
        raise DomainBoundaryError("Closed form requires g_h > 0 and g_c > 0")
    if p.gamma_h == p.gamma_c:
        raise DomainBoundaryError("Closed form is singular at gamma_h = gamma_c")

    H, C, eps = _two_ion_shorthand(p)
    z = p.gamma_h / (2 * p.gamma_c - p.gamma_h)
    b = 1 + p.gamma_c ** 2 / (4 * p.g_c ** 2)
    c = 2 + p.gamma_c * p.gamma_h ** 2 / (8 * p.gamma_c * p.g_h ** 2 - 4 * p.gamma_h * p.g_h ** 2)

    f1 = hyp2f1(1, b, c, z).value
    f2 = hyp2f1(2, 1 + b, 1 + c, z).value
    f3 = hyp2f1(3, 1 + b, 1 + c, z).value
    f4 = hyp_pfq((2, 2, 1 + b), (1, 1 + c), z).value

    numerator = 2 * (C * (1 + 8 * H) * (1 + 8 * (2 - eps) * H) * f1 + 8 * eps * (1 + 4 * C) * H ** 2 * f2) \
        * ((1 - (H / C + 8 * H)) * f3 - f2)
    denominator = (eps - 1) * (1 + 4 * C) \
        * (math.sqrt(H) * (1 + 8 * H) * f2 + 8 * H ** 1.5 * f4) ** 2
    return numerator / denominator


def g2_lowest_order(p: ModelParams) -> float:
    H, C, _ = _two_ion_shorthand(p)
    return 2 - 8 * (2 * H - C) / ((1 + 4 * C) * (1 + 16 * H))


def g2_lowest_order_taylor(p: ModelParams) -> float:
    """ Первый порядок по g_h^2/gamma_h^2 и g_c^2/gamma_c^2 """
    H, C, _ = _two_ion_shorthand(p)
    return 2 - 8 * (2 * H - C)


def g2_overdamped(p: ModelParams) -> float:
    H, C, _ = _two_ion_shorthand(p)
    return (1 + 1 / (1 + 16 * H)) * (1 + 4 * C)


# ---------------------------------------------------------------- один ион

def _equal_gamma(p: ModelParams) -> float:
    if abs(p.gamma_h - p.gamma_c) > 1e-12 * max(p.gamma_h, p.gamma_c):
        raise ParameterError(
            f"Equal-gamma formula requires gamma_h = gamma_c, got {p.gamma_h} and {p.gamma_c}"
        )
    return p.gamma_h


def _single_denominator(n: int, p: ModelParams, gamma: float) -> float:
    return 1 + 8 * p.g_c ** 2 / gamma ** 2 * n + 8 * p.g_h ** 2 / gamma ** 2 * (n + 1)


def single_equal_gamma_rates(p: ModelParams) -> RecurrenceRates:
    """ Приток 4 kappa_h n / D(n-1) и отток 4 kappa_c n / D(n) """
    gamma = _equal_gamma(p)
    return RecurrenceRates(
        gain=lambda n: 4 * p.g_h ** 2 / gamma * n / _single_denominator(n - 1, p, gamma),
        loss=lambda n: 4 * p.g_c ** 2 / gamma * n / _single_denominator(n, p, gamma),
    )


def pn_single_equal_gamma(p: ModelParams, n_max: int = 64) -> PhononDistribution:
    _equal_gamma(p)
    if p.g_h >= p.g_c:
        raise DistributionError(f"Distribution does not normalize for g_h={p.g_h} >= g_c={p.g_c}")
    return pn_from_rates(single_equal_gamma_rates(p), n_max)


def p0_single_equal_gamma(p: ModelParams) -> float:
    gamma = _equal_gamma(p)
    G, h = p.g_c ** 2 / gamma ** 2, p.g_h ** 2 / gamma ** 2
    if h >= G:
        raise DistributionError("Vacuum probability undefined for g_h >= g_c")
    return (G - h) ** 2 * (1 + 8 * h) / (G ** 2 - G * h + 16 * G ** 2 * h)


def nbar_single_equal_gamma(p: ModelParams) -> float:
    gamma = _equal_gamma(p)
    gc2, gh2, g2 = p.g_c ** 2, p.g_h ** 2, gamma ** 2
    if gh2 >= gc2:
        raise DistributionError("Mean occupation diverges for g_h >= g_c")
    return gh2 * (g2 * (gc2 - gh2) + 8 * (gc2 ** 2 + 3 * gc2 * gh2)) \
        / ((gc2 - gh2) * (16 * gc2 * gh2 + g2 * (gc2 - gh2)))


def g2_single_equal_gamma(p: ModelParams) -> float:
    """ Точное выражение при gamma_h = gamma_c, включая предел g_h = g_c """
    gamma = _equal_gamma(p)
    if p.g_h > p.g_c:
        raise ParameterError(f"g_h={p.g_h} exceeds g_c={p.g_c}")
    gc2, gh2, g2 = p.g_c ** 2, p.g_h ** 2, gamma ** 2
    detuned = g2 * (gc2 - gh2)
    denominator = (detuned + 8 * (gc2 ** 2 + 3 * gc2 * gh2)) ** 2
    if denominator == 0:
        raise DomainBoundaryError("g2 undefined without cooling coupling")
    return 2 * (detuned + 16 * gc2 * gh2) * (detuned + 16 * (gc2 ** 2 + 2 * gc2 * gh2)) / denominator


def g2_single_limits(p: ModelParams, which: G2Limit) -> float:
    gamma = p.gamma_h
    if which is G2Limit.COOLING_OVERDAMPED:
        return 2.0
    if which is G2Limit.WEAK_HEATING:
        x = p.g_c ** 2 / gamma ** 2
        return 2 * (1 + 16 * x) / (1 + 8 * x) ** 2
    if which is G2Limit.STRONG_DRIVE:
        gc2, gh2 = p.g_c ** 2, p.g_h ** 2
        if gc2 + gh2 == 0:
            raise DomainBoundaryError("Strong-drive limit undefined at g_h = g_c = 0")
        return 8 * gh2 * (gc2 + 2 * gh2) / (gc2 + 3 * gh2) ** 2
    raise ParameterError(f"Unknown limit {which!r}")


def _level_matrix(n: int, p: ModelParams) -> np.ndarray:
    """
    Генератор x' = -M x + b для девяти элементов уровня n, n' = n:
    (00;n n), (01;n n+1), (10;n+1 n), (11;n+1 n+1), (02;n n-1),
    (20;n-1 n), (22;n-1 n-1), (12;n+1 n-1), (21;n-1 n+1),
    где 1 возбуждается нагревом, 2 охлаждением
    """
    gh, gc = p.g_h, p.g_c
    sh, sc = math.sqrt(n + 1), math.sqrt(n)
    half_h, half_c = p.gamma_h / 2, p.gamma_c / 2
    closure = (p.gamma_h + p.gamma_c) / 2

    rhs = np.zeros((9, 9), dtype=complex)
    rhs[0, [2, 1, 5, 4, 0]] = [-1j * gh * sh, 1j * gh * sh, -1j * gc * sc, 1j * gc * sc, -closure]
    rhs[1, [3, 0, 8, 1]] = [-1j * gh * sh, 1j * gh * sh, -1j * gc * sc, -half_h]
    rhs[2, [0, 3, 7, 2]] = [-1j * gh * sh, 1j * gh * sh, 1j * gc * sc, -half_h]
    rhs[3, [1, 2, 3]] = [-1j * gh * sh, 1j * gh * sh, -p.gamma_h]
    rhs[4, [7, 6, 0, 4]] = [-1j * gh * sh, -1j * gc * sc, 1j * gc * sc, -half_c]
    rhs[5, [8, 0, 6, 5]] = [1j * gh * sh, -1j * gc * sc, 1j * gc * sc, -half_c]
    rhs[6, [4, 5, 6]] = [-1j * gc * sc, 1j * gc * sc, -p.gamma_c]
    rhs[7, [4, 2, 7]] = [-1j * gh * sh, 1j * gc * sc, -(half_h + half_c)]
    rhs[8, [5, 1, 8]] = [1j * gh * sh, -1j * gc * sc, -(half_h + half_c)]
    return -rhs


def single_ion_level_rates(n: int, p: ModelParams) -> LevelRateSample:
    """
    Стационарное решение девяти уравнений уровня n при rho_nn = 1
    и замыкании rho11 + rho22 = rho_nn - rho00. Возвращает коэффициенты
    оттока вверх и вниз; gain равен оттоку вверх с уровня n-1
    """
    if n < 0:
        raise ParameterError(f"Level must be non-negative, got {n}")
    m = _level_matrix(n, p)
    condition = float(np.linalg.cond(m))
    if not math.isfinite(condition) or condition > MAX_CONDITION:
        raise SolverException(f"Level system at n={n} is singular, condition {condition:.2e}")
    b = np.zeros(9, dtype=complex)
    b[0] = (p.gamma_h + p.gamma_c) / 2
    x = np.linalg.solve(m, b)

    up = float(np.real(-1j * p.g_h * math.sqrt(n + 1) * (x[1] - x[2])))
    down = float(np.real(1j * p.g_c * math.sqrt(n) * (x[5] - x[4])))
    gain = _level_up(n - 1, p) if n > 0 else 0.0
    return LevelRateSample(n=n, gain=gain, loss=down, up=up, condition=condition)


def _level_up(n: int, p: ModelParams) -> float:
    return single_ion_level_rates(n, p).up


def single_ion_general_rates(p: ModelParams) -> RecurrenceRates:
    @lru_cache(maxsize=None)
    def sample(n: int) -> LevelRateSample:
        return single_ion_level_rates(n, p)

    return RecurrenceRates(gain=lambda n: sample(n - 1).up, loss=lambda n: sample(n).loss)


def pn_single_general(p: ModelParams, n_max: int = 64) -> PhononDistribution:
    """ Распределение из численных коэффициентов по уровням, gamma_h != gamma_c допустимо """
    return pn_from_rates(single_ion_general_rates(p), n_max)


# ---------------------------------------------------------------- области применимости

def _domain(checks: Dict[str, bool]) -> ValidityDomain:
    return ValidityDomain(
        assumptions=tuple(checks),
        violated=tuple(name for name, ok in checks.items() if not ok),
    )


def _single_validity(p: ModelParams) -> ValidityDomain:
    return _domain({"gamma_h=gamma_c": abs(p.gamma_h - p.gamma_c) <= 1e-12 * max(p.gamma_h, p.gamma_c)})


def _limit_validity(p: ModelParams, which: G2Limit) -> ValidityDomain:
    gamma = p.gamma_h
    checks = {
        G2Limit.COOLING_OVERDAMPED: {"g_c<<gamma": gamma >= SEPARATION * p.g_c},
        G2Limit.WEAK_HEATING: {"g_h<<gamma": gamma >= SEPARATION * p.g_h},
        G2Limit.STRONG_DRIVE: {"gamma<<g": min(p.g_h, p.g_c) >= SEPARATION * gamma},
    }[which]
    checks["gamma_h=gamma_c"] = _single_validity(p).ok
    return _domain(checks)


def _small_ratios(p: ModelParams) -> ValidityDomain:
    H, C, _ = _two_ion_shorthand(p)
    return _domain({
        "gamma_h<<gamma_c": p.gamma_c >= SEPARATION * p.gamma_h,
        "g_h<<gamma_h": SEPARATION ** 2 * H <= 1,
        "g_c<<gamma_c": SEPARATION ** 2 * C <= 1,
    })


ANALYTIC_G2: Dict[str, Tuple[Callable[[ModelParams], float], Callable[[ModelParams], ValidityDomain]]] = {
    "two-ion-full": (g2_two_ion_full, two_ion_validity),
    "two-ion-lowest": (g2_lowest_order, two_ion_validity),
    "two-ion-taylor": (g2_lowest_order_taylor, _small_ratios),
    "two-ion-overdamped": (g2_overdamped, two_ion_validity),
    "single-equal-gamma": (g2_single_equal_gamma, _single_validity),
    "single-" + G2Limit.COOLING_OVERDAMPED.value:
        (lambda p: g2_single_limits(p, G2Limit.COOLING_OVERDAMPED),
         lambda p: _limit_validity(p, G2Limit.COOLING_OVERDAMPED)),
    "single-" + G2Limit.WEAK_HEATING.value:
        (lambda p: g2_single_limits(p, G2Limit.WEAK_HEATING),
         lambda p: _limit_validity(p, G2Limit.WEAK_HEATING)),
    "single-" + G2Limit.STRONG_DRIVE.value:
        (lambda p: g2_single_limits(p, G2Limit.STRONG_DRIVE),
         lambda p: _limit_validity(p, G2Limit.STRONG_DRIVE)),
}


def analytic_g2(name: str, p: ModelParams) -> AnalyticResult:
    """ Значение аналитического g2 и нарушенные допущения """
    if name not in ANALYTIC_G2:
        raise ParameterError(f"Unknown analytic g2 '{name}', expected one of {sorted(ANALYTIC_G2)}")
    formula, validity = ANALYTIC_G2[name]
    domain = validity(p)
    if not domain.ok:
        logger.debug(f"{name}: assumptions violated {domain.violated}")
    return AnalyticResult(value=formula(p), validity=domain)

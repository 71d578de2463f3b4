"""
Сенсорика на сжатом фононном лазере: эффективный сигнал, квазивероятность,
W-фактор и квантовая информация Фишера
"""
import cmath
import math
from typing import Any, Dict, Iterable, List, Optional, Tuple

from scipy import integrate, optimize

from src.domain.entities import SensingReport
from src.domain.exceptions import DomainBoundaryError, ParameterError, DomainException
from src.domain.value_objects import ModelParams, SignalParams
from src.logconfig import opt_logger as log
from src.physics.meanfield import iss_two_ion
from src.physics.models import squeezed_mode_couplings

logger = log.setup_logger(name='sensing')

# чувствительность к силе у порога генерации, yN / sqrt(I); только для отчетов
FORCE_SENSITIVITY_YN_PER_SQRT_I = 53.0

# опорная точка: при eta = 0.05 предел Лэмба-Дике достигается при r = 2.9
LD_ANCHOR_ETA = 0.05
LD_ANCHOR_R = 2.9

# опубликованные оценки, которыми помечаются строки таблицы
REFERENCE_R = 1.45
REFERENCE_NOTE = "reference: enhancement ~80; heating penalty ~4.56"
LD_ANCHOR_NOTE = "reference: Lamb-Dicke limit at r~2.9 for eta=0.05"

MAX_EXPONENT = 700.0


def delta_eff(signal: SignalParams, r: float, beta: float) -> Tuple[float, float]:
    """ delta = cosh(r) eps - e^{i beta} sinh(r) eps*, в полярной форме (|delta|, фаза) """
    eps = signal.complex_value
    delta = math.cosh(r) * eps - cmath.exp(1j * beta) * math.sinh(r) * eps.conjugate()
    return abs(delta), cmath.phase(delta)


def _coefficients(p: ModelParams) -> Tuple[float, float, float]:
    """ A = 2 g_h^2 / gamma_h, B = 16 g_h^4 / gamma_h^3, C = kappa_c """
    a = 2 * p.g_h ** 2 / p.gamma_h
    if a <= 0:
        raise ParameterError("Quasi-probability requires g_h > 0")
    return a, 16 * p.g_h ** 4 / p.gamma_h ** 3, p.kappa_c


def log_quasi_prob(intensity: float, theta: float, p: ModelParams,
                   signal: SignalParams, r: float, beta: float) -> float:
    """ Показатель экспоненты P(I, theta) без нормировки """
    if intensity < 0:
        raise ParameterError("I must be non-negative")
    a, b, c = _coefficients(p)
    magnitude, phase = delta_eff(signal, r, beta)
    return -(b / (2 * a)) * intensity ** 4 + ((a - c) / a) * intensity ** 2 \
        - (2 * magnitude / a) * intensity * math.sin(theta - phase)


def quasi_prob(intensity: float, theta: float, p: ModelParams,
               signal: SignalParams, r: float, beta: float) -> float:
    exponent = log_quasi_prob(intensity, theta, p, signal, r, beta)
    if exponent > MAX_EXPONENT:
        raise DomainBoundaryError(f"Exponent {exponent:.1f} overflows, use log_quasi_prob")
    return math.exp(exponent)


def stationary_intensity(p: ModelParams) -> float:
    """ Радиальный максимум P при |eps| = 0: I^2 = (A - C) / B, иначе 0 """
    a, b, c = _coefficients(p)
    if a <= c:
        return 0.0
    return math.sqrt((a - c) / b)


def _envelope_peak(p: ModelParams, magnitude: float) -> Tuple[float, float]:
    """ Максимум верхней оценки показателя по theta и радиус, за которым она < peak - 60 """
    a, b, c = _coefficients(p)

    def envelope(x: float) -> float:
        return -(b / (2 * a)) * x ** 4 + ((a - c) / a) * x ** 2 + (2 * magnitude / a) * x

    cap = 2.0 * (1.0 + (abs(a - c) / b) ** 0.5 + (magnitude / b) ** (1 / 3))
    best = optimize.minimize_scalar(lambda x: -envelope(x), bounds=(0.0, cap), method="bounded")
    peak = max(-best.fun, envelope(0.0))
    while envelope(cap) > peak - 60:
        cap *= 2
    return peak, cap


def quasi_prob_normalizer(p: ModelParams, signal: SignalParams, r: float, beta: float) -> float:
    """ N = интеграл exp(...) по I in [0, inf), theta in [0, 2 pi) """
    magnitude, _ = delta_eff(signal, r, beta)
    peak, cap = _envelope_peak(p, magnitude)
    if peak > MAX_EXPONENT:
        raise DomainBoundaryError(f"Normalizer overflows, exponent peak {peak:.1f}")

    def integrand(intensity: float, theta: float) -> float:
        return math.exp(log_quasi_prob(intensity, theta, p, signal, r, beta) - peak)

    value, error = integrate.dblquad(integrand, 0.0, 2 * math.pi, 0.0, cap, epsabs=1e-12, epsrel=1e-10)
    logger.debug(f"Quasi-probability normalizer {value:.6e} (+/- {error:.1e}) x exp({peak:.3f})")
    return value * math.exp(peak)


def w_factor(r: float, beta: float, phi: float) -> float:
    """ W = cosh(2r) - cosh(r) sinh(r) cos(beta - 2 phi) """
    return math.cosh(2 * r) - math.cosh(r) * math.sinh(r) * math.cos(beta - 2 * phi)


def fisher_info(p: ModelParams, signal: SignalParams, r: float, beta: float,
                intensity: Optional[float] = None) -> SensingReport:
    """
    F_Q = 2 I^2 W^2 / A^2. Если I не задано, берется стационарная
    интенсивность двухионного лазера без сжатия
    """
    if r < 0:
        raise ParameterError(f"r must be non-negative, got {r}")
    if intensity is None:
        intensity = _unsqueezed_intensity(p)
    if intensity < 0:
        raise ParameterError("Intensity must be non-negative")

    a, _, _ = _coefficients(p)
    w = w_factor(r, beta, signal.phase)
    magnitude, phase = delta_eff(signal, r, beta)
    return SensingReport(
        w=w,
        fisher=2 * intensity ** 2 * w ** 2 / a ** 2,
        enhancement_vs_unsqueezed=math.cosh(2 * r) ** 2,
        heating_penalty=math.cosh(2 * r) / 2,
        delta_magnitude=magnitude,
        delta_phase=phase,
    )


def _unsqueezed_intensity(p: ModelParams) -> float:
    try:
        result = iss_two_ion(p)
    except DomainException as e:
        raise ParameterError(f"Intensity must be given explicitly: {e}")
    if result.unphysical:
        logger.warning(f"Parameters below lasing threshold (I={result.value:.3e}), using I=0")
        return 0.0
    return result.value


def ld_limit_squeeze(eta: float) -> float:
    """ Наибольшее r при eta e^r <= 0.05 e^{2.9}; не меньше нуля """
    if not 0 < eta < 1:
        raise ParameterError(f"eta must lie in (0, 1), got {eta}")
    return max(0.0, LD_ANCHOR_R + math.log(LD_ANCHOR_ETA / eta))


def reference_note(r: float, eta: float) -> str:
    notes = []
    if math.isclose(r, REFERENCE_R, abs_tol=1e-9):
        notes.append(REFERENCE_NOTE)
    if math.isclose(eta, LD_ANCHOR_ETA, abs_tol=1e-12) and math.isclose(r, LD_ANCHOR_R, abs_tol=1e-9):
        notes.append(LD_ANCHOR_NOTE)
    return "; ".join(notes)


def sensing_table(p: ModelParams, signal: SignalParams, eta: float,
                  r_values: Iterable[float], intensity: Optional[float] = None) -> List[Dict[str, Any]]:
    """ Строки отчета сенсорики для набора параметров сжатия """
    limit = ld_limit_squeeze(eta)
    if intensity is None:
        intensity = _unsqueezed_intensity(p)

    rows = []
    for r in r_values:
        report = fisher_info(p, signal, r, p.beta, intensity)
        g_bsb, g_rsb = squeezed_mode_couplings(p.g_h, r)
        reached = r >= limit - 1e-12
        row = {"r": r, **report.to_dict(), "g_bsb": g_bsb, "g_rsb": g_rsb,
               "ld_limit_reached": reached,
               "force_sensitivity_yn_per_sqrt_i": FORCE_SENSITIVITY_YN_PER_SQRT_I,
               "note": reference_note(r, eta)}
        if reached:
            logger.warning(f"r={r} reaches the Lamb-Dicke limit {limit:.3f} for eta={eta}")
        rows.append(row)
    return rows

"""
Аналитика среднего поля: стационарная интенсивность, эффективные скорости,
правые части уравнений и классификация фаз
"""
import math
from typing import Tuple, Callable, Optional

import numpy as np
from scipy.optimize import brentq

from src.config import config
from src.domain.entities import MeanFieldState
from src.domain.exceptions import DomainBoundaryError, ParameterError
from src.domain.value_objects import ModelParams, Phase, PhaseLabel, IntensityResult
from src.logconfig import opt_logger as log

logger = log.setup_logger(name='meanfield')


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= config.meanfield.boundary_rtol * max(abs(x), abs(y))


# ---- правые части ----

def _two_ion_derivative(v: np.ndarray, p: ModelParams) -> np.ndarray:
    a, sph, spc, szh, szc, _ = v
    ac = a.conjugate()
    smh, smc = sph.conjugate(), spc.conjugate()
    return np.array([
        -1j * p.g_c * smc - 1j * p.g_h * sph,
        -1j * p.g_h * a * szh - 0.5 * p.gamma_h * sph,
        -1j * p.g_c * ac * szc - 0.5 * p.gamma_c * spc,
        2j * p.g_h * (a * smh - ac * sph) - p.gamma_h * (szh + 1),
        2j * p.g_c * (ac * smc - a * spc) - p.gamma_c * (szc + 1),
        0j,
    ], dtype=complex)


def _single_ion_derivative(v: np.ndarray, p: ModelParams) -> np.ndarray:
    a, sph, spc, szh, szc, s21 = v
    ac = a.conjugate()
    smh, smc = sph.conjugate(), spc.conjugate()
    s12 = s21.conjugate()
    gh, gc, yh, yc = p.g_h, p.g_c, p.gamma_h, p.gamma_c
    relax_h = szh + 0.5 * (1 - szc)
    relax_c = szc + 0.5 * (1 - szh)
    return np.array([
        -1j * gc * smc - 1j * gh * sph,
        -1j * gh * a * szh - 1j * gc * ac * s21 - 0.5 * yh * sph,
        -1j * gc * ac * szc - 1j * gh * a * s12 - 0.5 * yc * spc,
        2j * gh * (a * smh - ac * sph) + 1j * gc * (ac * smc - a * spc)
        - (4 * yh / 3) * relax_h - (2 * yc / 3) * relax_c,
        2j * gc * (ac * smc - a * spc) + 1j * gh * (a * smh - ac * sph)
        - (4 * yc / 3) * relax_c - (2 * yh / 3) * relax_h,
        1j * gh * smc * a - 1j * gc * sph * a - 0.5 * (yh + yc) * s21,
    ], dtype=complex)


def two_ion_rhs(s: MeanFieldState, p: ModelParams) -> MeanFieldState:
    """ Уравнения среднего поля двухионного лазера в факторизации первого порядка """
    return MeanFieldState.from_array(_two_ion_derivative(s.to_array(), p))


def single_ion_rhs(s: MeanFieldState, p: ModelParams) -> MeanFieldState:
    """ Уравнения среднего поля одноионного лазера со связью через sigma_21 """
    return MeanFieldState.from_array(_single_ion_derivative(s.to_array(), p))


def spin_steady_two_ion(a: complex, p: ModelParams) -> MeanFieldState:
    """ Спиновые переменные в неподвижной точке при заданном <a> """
    intensity = abs(a) ** 2
    szh = -1.0 / (1 + 8 * (p.g_h ** 2 / p.gamma_h ** 2) * intensity)
    szc = -1.0 / (1 + 8 * (p.g_c ** 2 / p.gamma_c ** 2) * intensity)
    sph = -2j * p.g_h * a * szh / p.gamma_h
    spc = -2j * p.g_c * np.conj(a) * szc / p.gamma_c
    return MeanFieldState(a=complex(a), sp_h=complex(sph), sp_c=complex(spc), sz_h=szh, sz_c=szc)


# ---- интегрирование ----

def _integrate(derivative: Callable[[np.ndarray, ModelParams], np.ndarray], p: ModelParams,
               seed: MeanFieldState, t_final: Optional[float]) -> MeanFieldState:
    rates = (p.gamma_h, p.gamma_c, p.g_h, p.g_c)
    dt = config.meanfield.dt_scale / max(rates)
    horizon = t_final if t_final is not None else config.meanfield.horizon_scale / min(p.gamma_h, p.gamma_c)
    n_steps = max(1, math.ceil(horizon / dt))
    h = horizon / n_steps

    v = seed.to_array()
    worst = 0.0
    for _ in range(n_steps):
        k1 = derivative(v, p)
        k2 = derivative(v + 0.5 * h * k1, p)
        k3 = derivative(v + 0.5 * h * k2, p)
        k4 = derivative(v + h * k3, p)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        worst = max(worst, abs(v[3].real), abs(v[4].real))

    if worst > 1 + 1e-6:
        logger.warning(f"|<sigma_z>| reached {worst:.6f} along the trajectory")
    logger.debug(f"Mean-field integration: {n_steps} steps of {h:.3e}")
    return MeanFieldState.from_array(v)


def default_seed(amplitude: float = 0.1) -> MeanFieldState:
    return MeanFieldState(a=complex(amplitude))


def integrate_two_ion(p: ModelParams, seed: MeanFieldState = None,
                      t_final: float = None) -> MeanFieldState:
    return _integrate(_two_ion_derivative, p, seed or default_seed(), t_final)


def integrate_single_ion(p: ModelParams, seed: MeanFieldState = None,
                         t_final: float = None) -> MeanFieldState:
    return _integrate(_single_ion_derivative, p, seed or default_seed(), t_final)


# ---- стационарная интенсивность ----

def iss_two_ion(p: ModelParams) -> IntensityResult:
    """ gamma_h^2 gamma_c^2 (kappa_h - kappa_c) / (8 g_h^2 g_c^2 (gamma_c - gamma_h)) """
    denominator = 8 * p.g_h ** 2 * p.g_c ** 2 * (p.gamma_c - p.gamma_h)
    if _close(p.gamma_c, p.gamma_h) or denominator == 0:
        raise DomainBoundaryError("I_ss diverges on gamma_h = gamma_c or vanishing coupling")
    value = p.gamma_h ** 2 * p.gamma_c ** 2 * (p.kappa_h - p.kappa_c) / denominator
    return IntensityResult.tagged(value)


def _single_ion_denominator(p: ModelParams) -> float:
    return 4 * (p.g_c ** 2 / p.gamma_h - p.g_h ** 2 / p.gamma_c) * (p.kappa_h + p.kappa_c)


def iss_single_ion(p: ModelParams) -> IntensityResult:
    """ (gamma_c + gamma_h)(kappa_h - kappa_c) / (4(g_c^2/gamma_h - g_h^2/gamma_c)(kappa_h + kappa_c)) """
    denominator = _single_ion_denominator(p)
    if denominator == 0 or _close(p.g_c ** 2 / p.gamma_h, p.g_h ** 2 / p.gamma_c):
        raise DomainBoundaryError("I_ss diverges on g_c^2/gamma_h = g_h^2/gamma_c")
    value = (p.gamma_c + p.gamma_h) * (p.kappa_h - p.kappa_c) / denominator
    return IntensityResult.tagged(value)


def iss_single_ion_ld3(p: ModelParams) -> IntensityResult:
    """ Одноионная интенсивность с поправкой третьего порядка Лэмба-Дике """
    denominator = _single_ion_denominator(p) \
        + (p.gamma_c + p.gamma_h) * (p.kappa_h * p.eta_h ** 2 - p.kappa_c * p.eta_c ** 2)
    if abs(denominator) <= config.meanfield.boundary_rtol * abs(_single_ion_denominator(p)) \
            or denominator == 0:
        raise DomainBoundaryError("Third-order I_ss denominator vanishes")
    value = (p.gamma_c + p.gamma_h) * (p.kappa_h - p.kappa_c) / denominator
    return IntensityResult.tagged(value)


def rates_first_order(p: ModelParams, intensity: float) -> Tuple[float, float]:
    """ R = 2 kappa / (1 + 8 (g^2/gamma^2) I) """
    if intensity < 0:
        raise ParameterError("Intensity must be non-negative")
    r_h = 2 * p.kappa_h / (1 + 8 * (p.g_h ** 2 / p.gamma_h ** 2) * intensity)
    r_c = 2 * p.kappa_c / (1 + 8 * (p.g_c ** 2 / p.gamma_c ** 2) * intensity)
    return r_h, r_c


def _rate_ld3(kappa: float, g: float, gamma: float, eta: float, intensity: float) -> float:
    factor = 2 - intensity * eta ** 2
    return kappa * factor / (1 + 2 * (g ** 2 * intensity / gamma ** 2) * factor ** 2)


def rates_ld3(p: ModelParams, intensity: float) -> Tuple[float, float]:
    """ R = kappa (2 - I eta^2) / (1 + 2 (g^2 I / gamma^2)(2 - I eta^2)^2) """
    if intensity < 0:
        raise ParameterError("Intensity must be non-negative")
    return (_rate_ld3(p.kappa_h, p.g_h, p.gamma_h, p.eta_h, intensity),
            _rate_ld3(p.kappa_c, p.g_c, p.gamma_c, p.eta_c, intensity))


def iss_two_ion_ld3(p: ModelParams) -> IntensityResult:
    """ Корень R_h(I) = R_c(I) для скоростей третьего порядка """
    def balance(intensity: float) -> float:
        r_h, r_c = rates_ld3(p, intensity)
        return r_h - r_c

    if balance(0.0) <= 0:
        return IntensityResult(0.0)

    # обе скорости обращаются в ноль при I = 2/eta^2, ищем первое пересечение ниже
    eta = max(p.eta_h, p.eta_c)
    limit = 2 / eta ** 2 if eta > 0 else 1e12
    lower, upper = 0.0, min(1e-3, limit / 2)
    while balance(upper) > 0:
        lower, upper = upper, upper * 1.5
        if upper >= limit:
            logger.debug("No rate crossing found below the curvature zero")
            return IntensityResult(math.inf, unphysical=True)
    return IntensityResult(brentq(balance, lower, upper, xtol=1e-14, rtol=1e-14))


# ---- устойчивость и фазы ----

def intensity_rate_two_ion(intensity: float, p: ModelParams) -> float:
    """ dI/dt с точностью до положительного множителя """
    return 32 * intensity ** 2 * (p.gamma_h - p.gamma_c) \
        + 4 * intensity * (p.gamma_h ** 2 * p.gamma_c ** 2 / (p.g_h ** 2 * p.g_c ** 2)) \
        * (p.kappa_h - p.kappa_c)


def intensity_rate_single_ion(intensity: float, p: ModelParams) -> float:
    g = p.gamma_h ** 2 * p.gamma_c ** 2
    return 8 * intensity ** 2 * g * (p.kappa_h + p.kappa_c) \
        * (p.g_h ** 2 / p.gamma_c - p.g_c ** 2 / p.gamma_h) \
        + 2 * intensity * g * (p.gamma_h + p.gamma_c) * (p.kappa_h - p.kappa_c)


def _label(above_threshold: bool, stable: bool) -> PhaseLabel:
    if stable:
        return PhaseLabel.LASING if above_threshold else PhaseLabel.DARK
    return PhaseLabel.HEATING if above_threshold else PhaseLabel.UNSTABLE_DARK


def classify_two_ion(p: ModelParams) -> Phase:
    """ Фаза по знакам kappa_h - kappa_c и gamma_h - gamma_c """
    boundaries = []
    if _close(p.kappa_h, p.kappa_c):
        boundaries.append("kappa_h=kappa_c")
    if _close(p.gamma_h, p.gamma_c):
        boundaries.append("gamma_h=gamma_c")
    if boundaries:
        return Phase(PhaseLabel.BOUNDARY, tuple(boundaries))
    return Phase(_label(p.kappa_h > p.kappa_c, p.gamma_h < p.gamma_c))


def classify_single_ion(p: ModelParams) -> Phase:
    """ Фаза по знакам kappa_h - kappa_c и g_h^2/gamma_c - g_c^2/gamma_h """
    heat_term, cool_term = p.g_h ** 2 / p.gamma_c, p.g_c ** 2 / p.gamma_h
    boundaries = []
    if _close(p.kappa_h, p.kappa_c):
        boundaries.append("kappa_h=kappa_c")
    if _close(heat_term, cool_term):
        boundaries.append("g_h^2*gamma_h=g_c^2*gamma_c")
    if boundaries:
        return Phase(PhaseLabel.BOUNDARY, tuple(boundaries))
    return Phase(_label(p.kappa_h > p.kappa_c, heat_term < cool_term))

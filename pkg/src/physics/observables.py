"""
Наблюдаемые по матрице плотности: заселенность, распределение, g2(0),
функция Вигнера, фактор Фано
"""
import math
from typing import Tuple

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from src.domain.entities import DensityMatrix, HilbertLayout, PhononDistribution, WignerGrid
from src.domain.exceptions import ParameterError, UndefinedObservableError
from src.logconfig import opt_logger as log

logger = log.setup_logger(name='observables')

NBAR_FLOOR = 1e-12
BOUNDARY_MASS_TOL = 1e-2


def reduced_motional(rho: DensityMatrix) -> np.ndarray:
    """ Частичный след по всем сомножителям, кроме последнего (движение) """
    n = rho.layout.motional_dim
    if n < 3:
        raise ParameterError(f"Layout {rho.layout.factors} has no bosonic factor")
    rest = rho.layout.total_dim // n
    blocks = rho.entries.reshape((rest, n, rest, n))
    return np.einsum("ajak->jk", blocks)


def motional_diagonal(rho: DensityMatrix) -> np.ndarray:
    return np.real(np.diag(reduced_motional(rho)))


def distribution_from_rho(rho: DensityMatrix) -> PhononDistribution:
    p = np.clip(motional_diagonal(rho), 0.0, None)
    return PhononDistribution(p / p.sum())


def mean_n(rho: DensityMatrix) -> float:
    """ Tr(rho a†a) """
    diag = motional_diagonal(rho)
    return float(np.dot(np.arange(diag.size), diag))


def g2_from_rho(rho: DensityMatrix) -> float:
    """ <a†a†aa> / <a†a>^2 """
    diag = motional_diagonal(rho)
    n = np.arange(diag.size)
    nbar = float(np.dot(n, diag))
    if nbar < NBAR_FLOOR:
        raise UndefinedObservableError(f"g2 undefined at nbar={nbar:.3e}")
    return float(np.dot(n * (n - 1), diag)) / nbar ** 2


def fano(p: PhononDistribution) -> float:
    """ Var(n) / nbar """
    if p.mean < NBAR_FLOOR:
        raise UndefinedObservableError("Fano factor undefined at nbar=0")
    return p.variance / p.mean


def total_variation(p: PhononDistribution, q: PhononDistribution) -> float:
    size = max(p.p.size, q.p.size)
    a = np.pad(p.p, (0, size - p.p.size))
    b = np.pad(q.p, (0, size - q.p.size))
    return 0.5 * float(np.sum(np.abs(a - b)))


def fock_state(n: int, n_max: int) -> DensityMatrix:
    if not 0 <= n < n_max:
        raise ParameterError(f"Fock level {n} outside {n_max} levels")
    state = np.zeros(n_max, dtype=complex)
    state[n] = 1.0
    return DensityMatrix.pure(HilbertLayout((n_max,)), state)


def coherent_state(alpha: complex, n_max: int) -> DensityMatrix:
    amplitudes = np.zeros(n_max, dtype=complex)
    amplitudes[0] = math.exp(-abs(alpha) ** 2 / 2)
    for k in range(1, n_max):
        amplitudes[k] = amplitudes[k - 1] * alpha / math.sqrt(k)
    return DensityMatrix.pure(HilbertLayout((n_max,)), amplitudes)


def thermal_state(nbar: float, n_max: int) -> DensityMatrix:
    if nbar < 0:
        raise ParameterError("nbar must be non-negative")
    n = np.arange(n_max)
    p = (nbar / (1 + nbar)) ** n / (1 + nbar)
    return DensityMatrix(HilbertLayout((n_max,)), np.diag(p / p.sum()).astype(complex))


def _displaced_parity_element(m: int, n: int, beta: np.ndarray) -> np.ndarray:
    """ (-1)^n <m|D(beta)|n> при m >= n через обобщенные многочлены Лагерра """
    k = m - n
    x = np.abs(beta) ** 2
    log_magnitude = 0.5 * (gammaln(n + 1) - gammaln(m + 1)) - x / 2
    if k > 0:
        # |beta|^k обращается в ноль в начале координат
        with np.errstate(divide="ignore"):
            log_magnitude = log_magnitude + k * np.log(np.abs(beta))
    phase = np.exp(1j * k * np.angle(beta))
    return (-1) ** n * np.exp(log_magnitude) * phase * eval_genlaguerre(n, k, x)


def wigner(rho: DensityMatrix, re_bounds: Tuple[float, float] = (-4.0, 4.0),
           im_bounds: Tuple[float, float] = (-4.0, 4.0), resolution: int = 41) -> WignerGrid:
    """
    W(alpha) = (2/pi) Tr[D†(alpha) rho D(alpha) P], P = exp(i pi a†a).
    D(alpha) P D†(alpha) = D(2 alpha) P, поэтому элементы считаются точно
    без усечения по alpha. Спины предварительно вычеркиваются частичным следом
    """
    if resolution < 2:
        raise ParameterError("resolution must be >= 2")
    motional = reduced_motional(rho) if len(rho.layout.factors) > 1 else rho.entries
    n_levels = motional.shape[0]

    re_axis = np.linspace(re_bounds[0], re_bounds[1], resolution)
    im_axis = np.linspace(im_bounds[0], im_bounds[1], resolution)
    beta = 2 * (re_axis[np.newaxis, :] + 1j * im_axis[:, np.newaxis])

    # матрица Эрмитова: пары (m, n) и (n, m) дают комплексно сопряженные вклады
    cutoff = 1e-15 * float(np.max(np.abs(motional)))
    total = np.zeros(beta.shape)
    for n in range(n_levels):
        for m in range(n, n_levels):
            element = motional[n, m]
            if abs(element) <= cutoff:
                continue
            term = element * _displaced_parity_element(m, n, beta)
            total += term.real if m == n else 2 * term.real
    values = (2 / math.pi) * total

    grid = WignerGrid(re_bounds[0], re_bounds[1], im_bounds[0], im_bounds[1], resolution, values)
    edge = grid.boundary_mass()
    if edge > BOUNDARY_MASS_TOL * max(abs(grid.integral()), NBAR_FLOOR):
        logger.warning(f"Wigner grid boundary carries mass {edge:.3e}, widen the window")
    return grid


def quadrature_variances(grid: WignerGrid) -> Tuple[float, float]:
    """ Дисперсии маргинальных распределений по Re(alpha) и Im(alpha) """
    def _variance(axis: np.ndarray, marginal: np.ndarray) -> float:
        weight = marginal / np.sum(marginal)
        mean = float(np.dot(axis, weight))
        return float(np.dot((axis - mean) ** 2, weight))

    return (_variance(grid.re_axis, grid.values.sum(axis=0)),
            _variance(grid.im_axis, grid.values.sum(axis=1)))


"""
Гамильтонианы и операторы скачков для всех вариантов фононного лазера
"""
import math
from typing import List, Tuple

import numpy as np

from src.domain.entities import HilbertLayout, OperatorMatrix
from src.domain.exceptions import ParameterError
from src.domain.value_objects import ModelParams, ModelSpec, ModelKind, LdOrder
from src.logconfig import opt_logger as log
from src.physics.hilbert import (
    fock_destroy, number_op, identity, sigma_plus, sigma_minus, transition, embed, tensor
)

logger = log.setup_logger(name='models')

Model = Tuple[OperatorMatrix, List[OperatorMatrix]]

# heat-spin ⊗ cool-spin ⊗ motion
HEAT, COOL, MOTION = 0, 1, 2


def effective_coupling(eta: float, omega: float) -> float:
    """ eta * Omega * exp(-eta^2 / 2) """
    if not 0 <= eta < 1:
        raise ParameterError(f"eta must lie in [0, 1), got {eta}")
    if omega < 0:
        raise ParameterError(f"omega must be non-negative, got {omega}")
    return eta * omega * math.exp(-eta ** 2 / 2)


def cooperativity(p: ModelParams) -> float:
    if p.kappa_c == 0:
        return math.inf
    return p.kappa_h / p.kappa_c


def squeezed_mode_couplings(g: float, r: float) -> Tuple[float, float]:
    """ (g_BSB, g_RSB) = (g cosh r, g sinh r) """
    if r < 0:
        raise ParameterError(f"r must be non-negative, got {r}")
    return g * math.cosh(r), g * math.sinh(r)


def squeezed_mode_operator(n_max: int, r: float, beta: float = 0.0) -> OperatorMatrix:
    """ A = cosh(r) a + e^{i beta} sinh(r) a† """
    a = fock_destroy(n_max)
    return a * math.cosh(r) + a.dag() * (np.exp(1j * beta) * math.sinh(r))


def _ld3_lowering(mode: OperatorMatrix, eta: float) -> OperatorMatrix:
    """ (1 - eta^2/2 A†A) A; при A = a это (1 - eta^2/2 a†a) a """
    n = mode.dag() @ mode
    return (identity(mode.layout.total_dim) - n * (eta ** 2 / 2)) @ mode


def _warn_zero_coupling(eta: float, n_max: int, label: str) -> None:
    if eta > 0 and 2 / eta ** 2 < n_max - 1:
        logger.warning(
            f"{label}: third-order sideband coupling vanishes at n = {2 / eta ** 2:.1f} "
            f"inside the truncation n_max={n_max}"
        )


def _mode_operators(p: ModelParams, n_max: int, ld_order: LdOrder,
                    mode: OperatorMatrix = None) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """ Понижающие операторы, входящие в нагревающую и охлаждающую боковые полосы """
    if mode is None:
        mode = fock_destroy(n_max)
    if ld_order is LdOrder.FIRST:
        return mode, mode
    _warn_zero_coupling(p.eta_h, n_max, "heating")
    _warn_zero_coupling(p.eta_c, n_max, "cooling")
    return _ld3_lowering(mode, p.eta_h), _ld3_lowering(mode, p.eta_c)


def _two_ion(p: ModelParams, n_max: int, k_h: OperatorMatrix, k_c: OperatorMatrix) -> Model:
    layout = HilbertLayout((2, 2, n_max))
    kh = embed(k_h, MOTION, layout)
    kc = embed(k_c, MOTION, layout)
    sph = embed(sigma_plus(), HEAT, layout)
    spc = embed(sigma_plus(), COOL, layout)
    smh, smc = sph.dag(), spc.dag()

    # анти-Джейнс-Каммингс на нагревающем ионе, Джейнс-Каммингс на охлаждающем
    H = (kh.dag() @ sph + kh @ smh) * p.g_h + (kc.dag() @ smc + kc @ spc) * p.g_c
    jumps = [
        embed(sigma_minus(), HEAT, layout) * math.sqrt(p.gamma_h),
        embed(sigma_minus(), COOL, layout) * math.sqrt(p.gamma_c),
    ]
    return H, jumps


def _single_ion(p: ModelParams, n_max: int, k_h: OperatorMatrix, k_c: OperatorMatrix) -> Model:
    # |2> возбуждается на синей полосе, |1> на красной
    s20 = transition(3, 2, 0)
    s10 = transition(3, 1, 0)
    H = (tensor([s20, k_h.dag()]) + tensor([s20.dag(), k_h])) * p.g_h \
        + (tensor([s10, k_c]) + tensor([s10.dag(), k_c.dag()])) * p.g_c
    eye = identity(n_max)
    jumps = [
        tensor([transition(3, 0, 2), eye]) * math.sqrt(p.gamma_h),
        tensor([transition(3, 0, 1), eye]) * math.sqrt(p.gamma_c),
    ]
    return H, jumps


def two_ion_model(p: ModelParams, n_max: int) -> Model:
    """ H = g_h(a†σ+h + aσ-h) + g_c(a†σ-c + aσ+c), скачки sqrt(γ)σ- """
    k_h, k_c = _mode_operators(p, n_max, LdOrder.FIRST)
    return _two_ion(p, n_max, k_h, k_c)


def single_ion_model(p: ModelParams, n_max: int) -> Model:
    """ H = g_h(|2><0|a† + |0><2|a) + g_c(|1><0|a + |0><1|a†) """
    k_h, k_c = _mode_operators(p, n_max, LdOrder.FIRST)
    return _single_ion(p, n_max, k_h, k_c)


def ld3_two_ion_model(p: ModelParams, n_max: int) -> Model:
    """ Третий порядок Лэмба-Дике: a† -> a†(1 - eta^2/2 a†a) в обеих полосах """
    k_h, k_c = _mode_operators(p, n_max, LdOrder.THIRD)
    return _two_ion(p, n_max, k_h, k_c)


def ld3_single_ion_model(p: ModelParams, n_max: int) -> Model:
    k_h, k_c = _mode_operators(p, n_max, LdOrder.THIRD)
    return _single_ion(p, n_max, k_h, k_c)


def squeezed_sideband_hamiltonian(p: ModelParams, n_max: int) -> OperatorMatrix:
    """
    Двухионный гамильтониан в сжатой моде, разложенный по синей и красной
    полосам с g_BSB = g cosh r, g_RSB = g sinh r
    """
    layout = HilbertLayout((2, 2, n_max))
    a = embed(fock_destroy(n_max), MOTION, layout)
    ad = a.dag()
    sph = embed(sigma_plus(), HEAT, layout)
    spc = embed(sigma_plus(), COOL, layout)
    smh, smc = sph.dag(), spc.dag()
    phase = np.exp(1j * p.beta)

    bsb_h, rsb_h = squeezed_mode_couplings(p.g_h, p.r)
    bsb_c, rsb_c = squeezed_mode_couplings(p.g_c, p.r)
    heating = (ad @ sph + a @ smh) * bsb_h \
        + (a @ sph * np.conj(phase) + ad @ smh * phase) * rsb_h
    cooling = (ad @ smc + a @ spc) * bsb_c \
        + (a @ smc * np.conj(phase) + ad @ spc * phase) * rsb_c
    return heating + cooling


def squeezed_model(spec: ModelSpec, p: ModelParams, n_max: int) -> Model:
    """ Модель выбранного типа, где a заменен на A = cosh(r) a + e^{i beta} sinh(r) a† """
    if not spec.squeezed:
        raise ParameterError("squeezed_model requires spec.squeezed = True")

    if spec.kind is ModelKind.TWO_ION and spec.ld_order is LdOrder.FIRST:
        _, jumps = two_ion_model(p, n_max)
        return squeezed_sideband_hamiltonian(p, n_max), jumps

    mode = squeezed_mode_operator(n_max, p.r, p.beta)
    k_h, k_c = _mode_operators(p, n_max, spec.ld_order, mode)
    if spec.kind is ModelKind.TWO_ION:
        return _two_ion(p, n_max, k_h, k_c)
    return _single_ion(p, n_max, k_h, k_c)


def build_model(spec: ModelSpec, p: ModelParams) -> Model:
    """ Выбор построителя по типу, порядку Лэмба-Дике и сжатию """
    n_max = spec.n_max
    if spec.squeezed:
        return squeezed_model(spec, p, n_max)
    builders = {
        (ModelKind.TWO_ION, LdOrder.FIRST): two_ion_model,
        (ModelKind.TWO_ION, LdOrder.THIRD): ld3_two_ion_model,
        (ModelKind.SINGLE_ION, LdOrder.FIRST): single_ion_model,
        (ModelKind.SINGLE_ION, LdOrder.THIRD): ld3_single_ion_model,
    }
    return builders[(spec.kind, spec.ld_order)](p, n_max)


def number_operator(layout: HilbertLayout) -> OperatorMatrix:
    """ a†a на полном пространстве модели """
    return embed(number_op(layout.motional_dim), len(layout.factors) - 1, layout)

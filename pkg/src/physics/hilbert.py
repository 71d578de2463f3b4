"""
Операторы на усеченных тензорных пространствах: бозонные, спиновые, кутритные
"""
import math
from typing import List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from src.config import config
from src.domain.entities import HilbertLayout, OperatorMatrix, MatrixLike
from src.domain.exceptions import ParameterError, UnitarityError, LayoutMismatchError
from src.logconfig import opt_logger as log

logger = log.setup_logger(name='hilbert')


def _store(matrix: MatrixLike) -> MatrixLike:
    """ Dense ниже порога размерности, CSR выше """
    dim = matrix.shape[0]
    if dim < config.solver.dense_threshold:
        return matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=complex)
    return sp.csr_matrix(matrix, dtype=complex)


def _single(dim: int, matrix: MatrixLike) -> OperatorMatrix:
    return OperatorMatrix(HilbertLayout((dim,)), _store(matrix))


def fock_destroy(n_max: int) -> OperatorMatrix:
    """ Оператор уничтожения a с <n-1|a|n> = sqrt(n) """
    if n_max < 2:
        raise ParameterError(f"n_max must be >= 2, got {n_max}")
    diag = np.sqrt(np.arange(1, n_max, dtype=float))
    return _single(n_max, sp.diags(diag, offsets=1, shape=(n_max, n_max), dtype=complex))


def fock_create(n_max: int) -> OperatorMatrix:
    return fock_destroy(n_max).dag()


def number_op(n_max: int) -> OperatorMatrix:
    if n_max < 2:
        raise ParameterError(f"n_max must be >= 2, got {n_max}")
    return _single(n_max, sp.diags(np.arange(n_max, dtype=complex), shape=(n_max, n_max)))


def identity(dim: int) -> OperatorMatrix:
    if dim < 2:
        raise ParameterError(f"dim must be >= 2, got {dim}")
    return _single(dim, sp.identity(dim, dtype=complex))


def transition(dim: int, to_level: int, from_level: int) -> OperatorMatrix:
    """ |to_level><from_level|; transition(2, 1, 0) это sigma+ """
    if dim < 2:
        raise ParameterError(f"dim must be >= 2, got {dim}")
    if not (0 <= to_level < dim and 0 <= from_level < dim):
        raise ParameterError(f"Levels ({to_level}, {from_level}) out of range for dim {dim}")
    m = sp.lil_matrix((dim, dim), dtype=complex)
    m[to_level, from_level] = 1.0
    return _single(dim, m)


def sigma_plus() -> OperatorMatrix:
    return transition(2, 1, 0)


def sigma_minus() -> OperatorMatrix:
    return transition(2, 0, 1)


def sigma_z() -> OperatorMatrix:
    # |1><1| - |0><0|, основное состояние |0>
    return _single(2, np.diag([-1.0, 1.0]).astype(complex))


def tensor(factors: Sequence[OperatorMatrix]) -> OperatorMatrix:
    """ Кронекерово произведение в заданном порядке """
    if not factors:
        raise ParameterError("tensor needs a non-empty list of operators")
    layout = factors[0].layout
    result = sp.csr_matrix(factors[0].entries)
    for op in factors[1:]:
        layout = layout.concat(op.layout)
        result = sp.kron(result, sp.csr_matrix(op.entries), format="csr")
    return OperatorMatrix(layout, _store(result))


def embed(op: OperatorMatrix, position: int, layout: HilbertLayout) -> OperatorMatrix:
    """ Оператор одного сомножителя, продолженный единицами на все пространство """
    if layout.factors[position] != op.layout.total_dim:
        raise ParameterError(
            f"Operator dim {op.layout.total_dim} does not fit factor {position} of {layout.factors}"
        )
    parts = [identity(d) for d in layout.factors]
    parts[position] = op
    return tensor(parts)


def default_pad(n_max: int, r: float) -> int:
    return max(20, math.ceil(n_max * math.sinh(r) ** 2))


def _padded_exponential(generator: np.ndarray) -> np.ndarray:
    result = expm(generator)
    if not np.all(np.isfinite(result)):
        raise UnitarityError("Matrix exponential did not converge to finite values")
    defect = float(np.max(np.abs(result.conj().T @ result - np.eye(result.shape[0]))))
    if defect > config.solver.squeeze_unitarity_tol:
        raise UnitarityError(f"Unitarity defect {defect:.3e} above tolerance")
    return result


def squeeze_padded(xi: complex, dim: int) -> np.ndarray:
    """ S(xi) = exp((xi* a^2 - xi a†^2)/2) на пространстве размерности dim без проекции """
    a = fock_destroy(dim).dense()
    ad = a.conj().T
    generator = 0.5 * (np.conj(xi) * (a @ a) - xi * (ad @ ad))
    return _padded_exponential(generator)


def squeeze_matrix(xi: complex, n_max: int, pad: int = None) -> OperatorMatrix:
    """
    Оператор сжатия на n_max уровнях: экспонента считается на n_max + pad
    уровнях и проецируется обратно. При вещественном xi совпадает с
    exp((xi a^2 - xi a†^2)/2); S a S† = cosh(r) a + e^{i beta} sinh(r) a†
    """
    if n_max < 2:
        raise ParameterError(f"n_max must be >= 2, got {n_max}")
    r = abs(xi)
    if pad is None:
        pad = default_pad(n_max, r)
    if pad < 0:
        raise ParameterError("pad must be non-negative")

    full = squeeze_padded(xi, n_max + pad)
    leakage = squeeze_leakage(full, n_max)
    if leakage > config.solver.squeeze_unitarity_tol:
        logger.warning(f"Squeezed vacuum leaks {leakage:.2e} out of {n_max} levels, increase n_max")
    logger.debug(f"Squeeze operator r={r:.3f} on {n_max}+{pad} levels")
    return _single(n_max, full[:n_max, :n_max])


def squeeze_leakage(full: np.ndarray, n_max: int) -> float:
    """ Вес столбца S|0> за пределами n_max уровней """
    return float(np.sum(np.abs(full[n_max:, 0]) ** 2))


def unitarity_defect(op: OperatorMatrix) -> float:
    m = op.dense()
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def quadratures(n_max: int) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """ x = (a + a†)/sqrt(2), p = i(a† - a)/sqrt(2) """
    a = fock_destroy(n_max)
    ad = a.dag()
    x = (a + ad) * (1 / math.sqrt(2))
    p = (ad - a) * (1j / math.sqrt(2))
    return x, p


def layout_of(ops: List[OperatorMatrix]) -> HilbertLayout:
    """ Общее разбиение списка операторов """
    layouts = {op.layout for op in ops}
    if len(layouts) != 1:
        raise LayoutMismatchError(f"Operators live on different layouts: {sorted(l.factors for l in layouts)}")
    return layouts.pop()

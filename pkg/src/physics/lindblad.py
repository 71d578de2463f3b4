"""
Супероператор Линдблада, стационарное состояние, эволюция во времени
и скорость изменения средних в картине Гейзенберга
"""
import math
from typing import List, Callable, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from src.config import config
from src.domain.entities import (
    OperatorMatrix, DensityMatrix, Liouvillian, SteadyStateReport, HilbertLayout
)
from src.domain.exceptions import (
    NonHermitianError, SteadyStateError, PropagationError, LayoutMismatchError, ParameterError,
    UndefinedObservableError,
)
from src.logconfig import opt_logger as log
from src.physics.hilbert import layout_of
from src.physics.observables import mean_n, g2_from_rho, motional_diagonal

logger = log.setup_logger(name='lindblad')


def build_liouvillian(H: OperatorMatrix, jumps: List[OperatorMatrix]) -> Liouvillian:
    """
    L = -i(1⊗H - H^T⊗1) + sum_k [conj(L_k)⊗L_k - 1/2 1⊗L_k†L_k - 1/2 (L_k†L_k)^T⊗1]
    в векторизации по столбцам
    """
    layout = layout_of([H, *jumps])
    h = H.sparse()
    scale = max(1.0, float(abs(h).max())) if h.nnz else 1.0
    defect = H.hermiticity_defect()
    if defect > config.solver.hermitian_tol * scale:
        raise NonHermitianError(f"Hamiltonian is not Hermitian: max |H - H†| = {defect:.3e}")

    d = layout.total_dim
    eye = sp.identity(d, dtype=complex, format="csr")
    matrix = -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))

    for jump in jumps:
        c = jump.sparse()
        cdc = (c.conj().T @ c).tocsr()
        matrix = matrix + sp.kron(c.conj(), c) - 0.5 * sp.kron(eye, cdc) - 0.5 * sp.kron(cdc.T, eye)

    matrix = sp.csr_matrix(matrix)
    matrix.eliminate_zeros()
    logger.debug(f"Liouvillian dim {d}^2 with {matrix.nnz} non-zeros, {len(jumps)} jumps")
    return Liouvillian(layout=layout, matrix=matrix)


def apply_liouvillian(L: Liouvillian, rho: DensityMatrix) -> np.ndarray:
    """ L(rho) как матрица d x d """
    if rho.layout != L.layout:
        raise LayoutMismatchError(f"{rho.layout.factors} != {L.layout.factors}")
    d = L.dim
    return (L.matrix @ rho.vec()).reshape((d, d), order="F")


def _trace_row_indices(d: int) -> np.ndarray:
    return np.arange(d) * (d + 1)


def _bordered_system(L: Liouvillian) -> sp.csc_matrix:
    """ Первая строка заменена функционалом следа """
    d = L.dim
    size = d * d
    keep = np.ones(size)
    keep[0] = 0.0
    body = sp.diags(keep) @ L.matrix
    trace_row = sp.csr_matrix(
        (np.ones(d, dtype=complex), (np.zeros(d, dtype=int), _trace_row_indices(d))),
        shape=(size, size),
    )
    return (body + trace_row).tocsc()


def steady_state(L: Liouvillian) -> SteadyStateReport:
    """ Единственное стационарное состояние через разреженное LU """
    d = L.dim
    size = d * d
    system = _bordered_system(L)
    rhs = np.zeros(size, dtype=complex)
    rhs[0] = 1.0

    try:
        lu = splu(system)
    except RuntimeError as e:
        raise SteadyStateError(f"Sparse factorization failed: {e}")

    x = lu.solve(rhs)
    for step in range(config.solver.refinement_steps):
        correction = lu.solve(rhs - system @ x)
        x = x + correction
        logger.debug(f"Refinement step {step + 1}: |dx| = {np.max(np.abs(correction)):.3e}")

    if not np.all(np.isfinite(x)):
        raise SteadyStateError("Steady-state solve produced non-finite entries")

    entries = x.reshape((d, d), order="F")
    entries = 0.5 * (entries + entries.conj().T)
    entries = entries / np.trace(entries).real
    rho = DensityMatrix(L.layout, entries)

    residual = float(np.max(np.abs(L.matrix @ rho.vec())))
    lmax = float(np.max(np.abs(L.matrix.data))) if L.matrix.nnz else 1.0
    if residual > config.solver.steady_residual_tol * max(1.0, lmax):
        raise SteadyStateError(f"Steady-state residual {residual:.3e} above tolerance", residual)

    min_eig = float(np.min(np.linalg.eigvalsh(entries)))
    if min_eig < -config.solver.positivity_tol:
        raise SteadyStateError(f"Steady state is not positive: smallest eigenvalue {min_eig:.3e}", residual)

    return _report(rho, residual)


def _report(rho: DensityMatrix, residual: float) -> SteadyStateReport:
    diag = motional_diagonal(rho)
    tail_mass = float(diag[-1] + diag[-2])
    nbar = mean_n(rho)
    try:
        g2 = g2_from_rho(rho)
    except UndefinedObservableError:
        g2 = None

    truncation_ok = tail_mass < config.solver.tail_tol
    if not truncation_ok:
        logger.debug(f"Tail mass {tail_mass:.2e} at n_max={rho.layout.motional_dim}")
    return SteadyStateReport(
        rho=rho, nbar=nbar, g2=g2, tail_mass=tail_mass,
        truncation_ok=truncation_ok, residual=residual,
    )


def steady_state_adaptive(
        builder: Callable[[int], Liouvillian], n_max: int
) -> Tuple[SteadyStateReport, int]:
    """
    Удваивать n_max (не больше max_nmax), пока усечение не станет достаточным.
    При достижении предела возвращается последний отчет с truncation_ok=False
    """
    current = n_max
    while True:
        report = steady_state(builder(current))
        if report.truncation_ok or current >= config.solver.max_nmax:
            return report, current
        nxt = min(2 * current, config.solver.max_nmax)
        logger.info(f"Tail mass {report.tail_mass:.2e} at n_max={current}, retrying with {nxt}")
        current = nxt


def propagate(rho0: DensityMatrix, L: Liouvillian, t_final: float, dt: float) -> DensityMatrix:
    """ RK4 с фиксированным шагом для d rho/dt = L(rho) """
    if dt <= 0:
        raise ParameterError("dt must be positive")
    if t_final < 0:
        raise ParameterError("t_final must be non-negative")
    if rho0.layout != L.layout:
        raise LayoutMismatchError(f"{rho0.layout.factors} != {L.layout.factors}")
    if t_final == 0:
        return DensityMatrix(rho0.layout, rho0.entries.copy())

    n_steps = max(1, math.ceil(t_final / dt - 1e-9))
    h = t_final / n_steps
    drift_tol = 1e-8 * max(1.0, t_final / dt)
    d = L.dim
    diag_idx = _trace_row_indices(d)

    m = L.matrix
    v = rho0.vec().copy()
    for step in range(1, n_steps + 1):
        k1 = m @ v
        k2 = m @ (v + 0.5 * h * k1)
        k3 = m @ (v + 0.5 * h * k2)
        k4 = m @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

        if step % 64 == 0 or step == n_steps:
            _check_stability(v, d, diag_idx, rho0.trace, drift_tol, step)

    return DensityMatrix.from_vec(L.layout, v)


def _check_stability(v: np.ndarray, d: int, diag_idx: np.ndarray, trace0: complex,
                     drift_tol: float, step: int) -> None:
    if not np.all(np.isfinite(v)) or np.max(np.abs(v)) > abs(trace0) + 1e-6:
        raise PropagationError(f"Integration blew up at step {step}, reduce dt")
    drift = abs(np.sum(v[diag_idx]) - trace0)
    if drift > drift_tol:
        raise PropagationError(f"Trace drift {drift:.3e} at step {step}, reduce dt")
    rho = v.reshape((d, d), order="F")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > drift_tol:
        raise PropagationError(f"Hermiticity drift {herm:.3e} at step {step}, reduce dt")


def adjoint_rate(O: OperatorMatrix, H: OperatorMatrix, jumps: List[OperatorMatrix],
                 rho: DensityMatrix) -> complex:
    """ d<O>/dt = i<[H,O]> + sum_k <L_k† O L_k - 1/2 (L_k†L_k O + O L_k†L_k)> """
    layout = layout_of([O, H, *jumps])
    if rho.layout != layout:
        raise LayoutMismatchError(f"{rho.layout.factors} != {layout.factors}")

    o, h, r = O.dense(), H.dense(), rho.entries
    generator = 1j * (h @ o - o @ h)
    for jump in jumps:
        c = jump.dense()
        cd = c.conj().T
        cdc = cd @ c
        generator = generator + cd @ o @ c - 0.5 * (cdc @ o + o @ cdc)
    return complex(np.trace(r @ generator))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """ 1/2 ||rho - sigma||_1 """
    if rho.layout != sigma.layout:
        raise LayoutMismatchError(f"{rho.layout.factors} != {sigma.layout.factors}")
    diff = rho.entries - sigma.entries
    eig = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return 0.5 * float(np.sum(np.abs(eig)))


def vacuum_state(layout: HilbertLayout) -> DensityMatrix:
    """ Все подсистемы в |0> """
    state = np.zeros(layout.total_dim, dtype=complex)
    state[0] = 1.0
    return DensityMatrix.pure(layout, state)

"""
Orthogonal matrices A with prescribed image under
h(A) = A^T diag(1 / c(A)) v, v = (-1/(s-1), ..., -1/(s-1), 1),
where c(A) are the row sums of A. Anti-rotating an s-structure by such an A
turns v, the coordinate vector of eta_s - (1/(s-1)) sum_{i<s} eta_i, into h(A).
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .constants import DEFAULT_SEED, EXPM_TERM_TOLERANCE, RANK_THRESHOLD, ROW_SUM_FLOOR, \
    SKEW_TOLERANCE, SOLVER_JACOBIAN_STEP, SOLVER_MAX_ITERATIONS, SOLVER_RESTARTS, SOLVER_TOLERANCE
from .exceptions import ConvergenceError, DimensionError, InvalidMatrixError, PreconditionError

_logger = logging.getLogger(__name__)

_TARGET_TOLERANCE = 1e-10
_LSTSQ_RCOND = 1e-8
_MIN_DAMPING = 1e-10


def row_sums(A):
    """c_k(A) = sum_j a_kj."""
    return np.asarray(A, dtype=float).sum(axis=1)


def base_vector(s):
    if s < 2:
        raise DimensionError(f"The map h needs s >= 2, got s={s}")
    return np.array([-1.0 / (s - 1)] * (s - 1) + [1.0])


def norm_bound(s):
    """
    Lower bound 2 / sqrt(s) for |h(A)| over A in O(s).

    |h(A)| = |v / c(A)| with |c(A)|^2 = s, and sum_k |v_k| = 2.
    """
    if s < 2:
        raise DimensionError(f"The map h needs s >= 2, got s={s}")
    return 2.0 / math.sqrt(s)


def _square(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {A.shape}")
    return A


def h_map(A):
    A = _square(A)
    c = row_sums(A)
    if np.min(np.abs(c)) < ROW_SUM_FLOOR:
        raise InvalidMatrixError(f"Row sums {c.tolist()} come closer than {ROW_SUM_FLOOR} to zero",
                                 {'row_sum': float(np.min(np.abs(c)))})
    return A.T @ (base_vector(A.shape[0]) / c)


def _check_skew(X):
    X = _square(X)
    defect = float(np.max(np.abs(X + X.T))) if X.size else 0.0
    if defect > SKEW_TOLERANCE:
        raise InvalidMatrixError(f"Matrix is not skew-symmetric: |X + X^T| = {defect:.3e}",
                                 {'skew': defect})
    return X


def dh_identity(X):
    """The differential of h at the identity: X^T v - diag(c(X)) v."""
    X = _check_skew(X)
    v = base_vector(X.shape[0])
    return X.T @ v - row_sums(X) * v


def skew_basis(s):
    """The matrices E_ij - E_ji, i < j."""
    basis = []
    for i in range(s):
        for j in range(i + 1, s):
            E = np.zeros((s, s))
            E[i, j] = 1.0
            E[j, i] = -1.0
            basis.append(E)
    return basis


def skew_from_parameters(parameters, s):
    X = np.zeros((s, s))
    for value, E in zip(parameters, skew_basis(s)):
        X += value * E
    return X


def image_rank(s):
    """Numerical rank of the differential of h at the identity."""
    if s < 2:
        raise DimensionError(f"image_rank needs s >= 2, got s={s}")
    columns = np.array([dh_identity(E) for E in skew_basis(s)]).T
    singular_values = np.linalg.svd(columns, compute_uv=False)
    rank = int(np.sum(singular_values > RANK_THRESHOLD))
    if rank < s - 1:
        _logger.warning(f"The differential of h at the identity has rank {rank} < {s - 1} for s={s}")
    return rank


def expm_skew(X):
    """
    exp(X) by scaling and squaring; the Taylor series of the scaled matrix
    is cut once a term drops below 1e-15.
    """
    X = _check_skew(X)
    norm = float(np.linalg.norm(X, 1))
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0 else 0
    Y = X / (2.0 ** squarings)
    result = np.eye(X.shape[0])
    term = np.eye(X.shape[0])
    for k in range(1, 64):
        term = term @ Y / k
        result = result + term
        if np.max(np.abs(term)) < EXPM_TERM_TOLERANCE:
            break
    for _ in range(squarings):
        result = result @ result
    return result


@dataclass(frozen=True)
class TargetVector:
    u: tuple

    def __post_init__(self):
        u = tuple(float(x) for x in self.u)
        object.__setattr__(self, 'u', u)
        if len(u) < 2:
            raise DimensionError(f"A target needs at least two coordinates, got {len(u)}")
        total = math.fsum(u)
        if abs(total) > _TARGET_TOLERANCE * (1.0 + max(abs(x) for x in u)):
            raise PreconditionError(f"Target {list(u)} does not lie in V: coordinates sum to {total:.3e}",
                                    {'sum': abs(total)})

    @property
    def s(self):
        return len(self.u)

    def as_array(self):
        return np.array(self.u)


@dataclass(frozen=True)
class RotationSolution:
    matrix: np.ndarray
    skew: np.ndarray
    residual: float
    iterations: int
    restarts: int

    @property
    def row_sums(self):
        return row_sums(self.matrix)

    @property
    def orthogonality_defect(self):
        return float(np.max(np.abs(self.matrix.T @ self.matrix - np.eye(self.matrix.shape[0]))))

    def to_dict(self):
        return {
            'A': self.matrix.tolist(),
            'X': self.skew.tolist(),
            'residual': self.residual,
            'iterations': self.iterations,
            'restarts': self.restarts,
            'row_sums': self.row_sums.tolist(),
            'orthogonality_defect': self.orthogonality_defect,
        }


class _Problem:
    def __init__(self, target, jacobian_step):
        self.u = target.as_array()
        self.s = target.s
        self.jacobian_step = jacobian_step

    def residual(self, parameters):
        A = expm_skew(skew_from_parameters(parameters, self.s))
        try:
            return h_map(A) - self.u
        except InvalidMatrixError:
            return None

    def jacobian(self, parameters, base):
        columns = []
        for k in range(len(parameters)):
            shifted = np.array(parameters, dtype=float)
            shifted[k] += self.jacobian_step
            moved = self.residual(shifted)
            if moved is None:
                return None
            columns.append((moved - base) / self.jacobian_step)
        return np.array(columns).T


def _gauss_newton(problem, parameters, max_iterations, tol):
    r = problem.residual(parameters)
    if r is None:
        return parameters, math.inf, 0
    iteration = 0
    for iteration in range(max_iterations):
        if np.max(np.abs(r)) <= tol:
            return parameters, float(np.max(np.abs(r))), iteration
        J = problem.jacobian(parameters, r)
        if J is None:
            break
        step = np.linalg.lstsq(J, -r, rcond=_LSTSQ_RCOND)[0]
        damping = 1.0
        current = float(np.linalg.norm(r))
        while damping >= _MIN_DAMPING:
            candidate = parameters + damping * step
            moved = problem.residual(candidate)
            if moved is not None and float(np.linalg.norm(moved)) < current:
                parameters, r = candidate, moved
                break
            damping /= 2.0
        else:
            break
    return parameters, float(np.max(np.abs(r))), iteration + 1


def solve_rotation(u, s=None, max_iterations=SOLVER_MAX_ITERATIONS, restarts=SOLVER_RESTARTS,
                   seed=DEFAULT_SEED, tol=SOLVER_TOLERANCE, jacobian_step=SOLVER_JACOBIAN_STEP):
    """
    Find A = exp(X), X skew, with |h(A) - u| <= tol.

    Gauss-Newton on the s(s-1)/2 skew parameters starts at X = 0 and, when
    that stalls, from `restarts` seeded random points.
    """
    target = u if isinstance(u, TargetVector) else TargetVector(tuple(u))
    if s is not None and s != target.s:
        raise DimensionError(f"Target {list(target.u)} has {target.s} coordinates, expected s={s}")
    bound = norm_bound(target.s)
    if float(np.linalg.norm(target.u)) < bound - tol:
        _logger.warning(f"Target {list(target.u)} lies inside the sphere |u| = {bound:.6f} "
                        f"that bounds the image of h; the search cannot converge")
    problem = _Problem(target, jacobian_step)
    size = target.s * (target.s - 1) // 2
    rng = np.random.default_rng(seed)
    starts = [np.zeros(size)] + [rng.uniform(-math.pi, math.pi, size) for _ in range(restarts)]

    best = None
    for attempt, start in enumerate(starts):
        parameters, residual, iterations = _gauss_newton(problem, start, max_iterations, tol)
        X = skew_from_parameters(parameters, target.s)
        solution = RotationSolution(expm_skew(X), X, residual, iterations, attempt)
        if best is None or residual < best.residual:
            best = solution
        if residual <= tol:
            _logger.info(f"Found A for target {list(target.u)} after {iterations} iterations "
                         f"and {attempt} restarts, residual {residual:.3e}")
            return solution
        _logger.warning(f"Attempt {attempt} for target {list(target.u)} stalled at residual {residual:.3e}")
    raise ConvergenceError(f"No orthogonal A with h(A) = {list(target.u)} found; "
                           f"best residual {best.residual:.3e}", best.residual, best)

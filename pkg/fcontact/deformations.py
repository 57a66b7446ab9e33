"""
Rotations, anti-rotations and type II deformations of metric f-structures.

Deformed tensors are closures over the tensors of the input structure,
so the algebraic identities between the two hold up to rounding only.
"""
import logging

import numpy as np

from .calculus import d_oneform_matrix, lie_derivative_oneform, lie_derivative_t11_matrix, nijenhuis
from .chart import sample_points
from .constants import DEFAULT_TOLERANCE, ORTHOGONALITY_TOLERANCE, ROW_SUM_FLOOR
from .exceptions import DimensionError, InvalidMatrixError, PreconditionError
from .fields import Metric, OneForm, Tensor11, VectorField, coordinate_frame, form_after, \
    outer, tensor_product
from .structures import compare_structures

_logger = logging.getLogger(__name__)

ROTATION = 'rotation'
ANTI_ROTATION = 'anti-rotation'


class RotationMatrix:
    """An orthogonal s x s matrix whose row sums c_i are all nonzero."""

    def __init__(self, matrix):
        A = np.array(matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise InvalidMatrixError(f"Rotation matrix must be square, got shape {A.shape}", {})
        defect = float(np.max(np.abs(A.T @ A - np.eye(A.shape[0]))))
        if defect > ORTHOGONALITY_TOLERANCE:
            raise InvalidMatrixError(f"Matrix is not orthogonal: |A^T A - I| = {defect:.3e}",
                                     {'orthogonality': defect})
        row_sums = A.sum(axis=1)
        smallest = float(np.min(np.abs(row_sums)))
        if smallest < ROW_SUM_FLOOR:
            raise InvalidMatrixError(f"Row sums {row_sums.tolist()} come closer than "
                                     f"{ROW_SUM_FLOOR} to zero", {'row_sum': smallest})
        A.setflags(write=False)
        row_sums.setflags(write=False)
        self.matrix = A
        self.row_sums = row_sums

    @property
    def s(self):
        return self.matrix.shape[0]

    def to_list(self):
        return self.matrix.tolist()

    def __repr__(self):
        return f"RotationMatrix({self.matrix.tolist()})"


def _as_rotation(A):
    return A if isinstance(A, RotationMatrix) else RotationMatrix(A)


def _check_size(S, A):
    if A.s != S.s:
        raise DimensionError(f"A {A.s}x{A.s} matrix cannot act on a structure with s={S.s}")


def _replace_eta_part(S, new_eta, label):
    """g - sum eta (x) eta + sum eta' (x) eta'."""
    pieces = [S.g] + [outer(eta, eta) for eta in S.eta] + [outer(eta, eta) for eta in new_eta]
    coefficients = [1.0] + [-1.0] * len(S.eta) + [1.0] * len(new_eta)
    return Metric.combination(coefficients, pieces, label=label)


def rotate(S, A):
    """
    The rotation of S by A:
    eta'_i = sum_t a_ti c_t eta_t, xi'_i = sum_t (a_ti / c_t) xi_t, f' = f,
    g' = g - sum eta (x) eta + sum eta' (x) eta'.
    """
    A = _as_rotation(A)
    _check_size(S, A)
    a, c = A.matrix, A.row_sums
    label = f"rotate({S.label})"
    eta = tuple(OneForm.combination([a[t, i] * c[t] for t in range(S.s)], S.eta, label=f"eta'{i + 1}")
                for i in range(S.s))
    xi = tuple(VectorField.combination([a[t, i] / c[t] for t in range(S.s)], S.xi, label=f"xi'{i + 1}")
               for i in range(S.s))
    _logger.info(f"Rotated {S.label} with row sums {c.tolist()}")
    return S.with_tensors(eta=eta, xi=xi, g=_replace_eta_part(S, eta, "g'"), label=label)


def antirotate(S, A):
    """
    The anti-rotation of S by A:
    eta~_i = (1 / c_i) sum_t a_it eta_t, xi~_i = c_i sum_t a_it xi_t, f~ = f.
    """
    A = _as_rotation(A)
    _check_size(S, A)
    a, c = A.matrix, A.row_sums
    eta = tuple(OneForm.combination(a[i] / c[i], S.eta, label=f"eta~{i + 1}") for i in range(S.s))
    xi = tuple(VectorField.combination(a[i] * c[i], S.xi, label=f"xi~{i + 1}") for i in range(S.s))
    _logger.info(f"Anti-rotated {S.label} with row sums {c.tolist()}")
    return S.with_tensors(eta=eta, xi=xi, g=_replace_eta_part(S, eta, "g~"), label=f"antirotate({S.label})")


def _check_thetas(S, thetas):
    thetas = tuple(thetas)
    if len(thetas) != S.s:
        raise DimensionError(f"Type II deformation of a structure with s={S.s} needs {S.s} one-forms, "
                             f"got {len(thetas)}")
    for theta in thetas:
        if not isinstance(theta, OneForm) or theta.chart.dim != S.dim:
            raise DimensionError(f"{theta!r} is not a one-form on the {S.dim}-dimensional chart")
    return thetas


def basic_residuals(S, thetas, samples):
    """
    Per-form residuals of closedness (d theta = 0) and basicness
    (theta(xi_j) = 0 and L_{xi_j} theta = 0) over the sample points.
    """
    thetas = _check_thetas(S, thetas)
    frame = coordinate_frame(S.chart)
    residuals = {}
    for i, theta in enumerate(thetas):
        closed = annihilates = invariant = 0.0
        for p in samples:
            closed = max(closed, float(np.max(np.abs(d_oneform_matrix(theta, p)))))
            for xi in S.xi:
                annihilates = max(annihilates, abs(float(theta.value(p) @ xi.value(p))))
                derivative = lie_derivative_oneform(xi, theta)
                invariant = max(invariant, max(abs(derivative(e, p)) for e in frame))
        residuals[f"theta_{i + 1}"] = {'closed': closed, 'annihilates_xi': annihilates, 'invariant': invariant}
    return residuals


def check_basic(S, thetas, samples=None, tol=DEFAULT_TOLERANCE):
    samples = sample_points(S.chart) if samples is None else samples
    residuals = basic_residuals(S, thetas, samples)
    failing = {name: values for name, values in residuals.items() if max(values.values()) > tol}
    if failing:
        raise PreconditionError(f"One-forms are not closed and basic: {failing}", residuals)
    return residuals


def type2(S, thetas, samples=None, tol=DEFAULT_TOLERANCE, check=True):
    """
    The type II deformation of S by closed basic one-forms theta_1..theta_s:
    eta-bar_i = eta_i + theta_i, g-bar = g + sum (eta_i (x) theta_i + theta_i (x) eta-bar_i),
    f-bar = f - sum (theta_i o f) (x) xi_i. The characteristic fields are reused as they are.
    """
    thetas = _check_thetas(S, thetas)
    if check:
        check_basic(S, thetas, samples, tol)
    eta = tuple(OneForm.combination([1.0, 1.0], [eta, theta], label=f"eta-bar{i + 1}")
                for i, (eta, theta) in enumerate(zip(S.eta, thetas)))
    g = Metric.combination(
        [1.0] + [1.0] * (2 * S.s),
        [S.g] + [outer(e, theta) for e, theta in zip(S.eta, thetas)]
        + [outer(theta, e) for theta, e in zip(thetas, eta)],
        label="g-bar")
    f = Tensor11.combination(
        [1.0] + [-1.0] * S.s,
        [S.f] + [tensor_product(form_after(theta, S.f), xi) for theta, xi in zip(thetas, S.xi)],
        label="f-bar")
    _logger.info(f"Type II deformation of {S.label} by {len(thetas)} one-forms")
    return S.with_tensors(eta=eta, f=f, g=g, label=f"type2({S.label})")


def transferred_thetas(A, thetas, kind=ROTATION):
    """
    The one-forms that make type II commute with a rotation or anti-rotation:
    theta~_i = (1 / c_i) sum_k a_ik theta_k for rotations and
    theta^_i = sum_k a_ki c_k theta_k for anti-rotations.
    """
    A = _as_rotation(A)
    a, c = A.matrix, A.row_sums
    if kind == ROTATION:
        return tuple(OneForm.combination(a[i] / c[i], thetas) for i in range(A.s))
    if kind == ANTI_ROTATION:
        return tuple(OneForm.combination(a[:, i] * c, thetas) for i in range(A.s))
    raise ValueError(f"Unknown deformation kind {kind!r}; expected {ROTATION!r} or {ANTI_ROTATION!r}")


def compose_checks(S, A, thetas, kind=ROTATION, samples=None, tol=1e-10):
    """
    Compare (1) rotate then type II by theta with (2) type II by the
    transferred forms then rotate. With kind='anti-rotation' the same
    comparison is made for the anti-rotation.
    """
    A = _as_rotation(A)
    _check_size(S, A)
    thetas = _check_thetas(S, thetas)
    samples = sample_points(S.chart) if samples is None else samples
    check_basic(S, thetas, samples)
    transform = rotate if kind == ROTATION else antirotate
    moved = transferred_thetas(A, thetas, kind)
    first = type2(transform(S, A), thetas, check=False)
    second = transform(type2(S, moved, check=False), A)
    differences = compare_structures(first, second, samples)
    worst = max(differences.values())
    passed = worst <= tol
    if passed:
        _logger.info(f"Both {kind} / type II paths agree to {worst:.3e}")
    else:
        _logger.warning(f"The {kind} / type II paths differ by {worst:.3e}")
    return {'kind': kind, 'differences': differences, 'max_difference': worst, 'passed': passed}


def _oneform_components(derivative, frame, p):
    return np.array([derivative(e, p) for e in frame])


def lie_transfer_residual(S, thetas, p):
    """
    Largest deviation from L_{xi_j} f-bar = L_{xi_j} f - sum_i L_{xi_j}(theta_i o f) (x) xi_i at p.
    """
    thetas = _check_thetas(S, thetas)
    deformed = type2(S, thetas, check=False)
    frame = coordinate_frame(S.chart)
    worst = 0.0
    for xi_j in S.xi:
        expected = lie_derivative_t11_matrix(xi_j, S.f, p)
        for theta, xi_i in zip(thetas, S.xi):
            beta = _oneform_components(lie_derivative_oneform(xi_j, form_after(theta, S.f)), frame, p)
            expected = expected - np.outer(xi_i.value(p), beta)
        actual = lie_derivative_t11_matrix(xi_j, deformed.f, p)
        worst = max(worst, float(np.max(np.abs(actual - expected))))
    return worst


def torsion_transfer_residual(S, thetas, p):
    """
    Largest deviation from [f-bar, f-bar](X, Y) = [f, f](X, Y) - sum_i theta_i([f, f](X, Y)) xi_i
    on coordinate frame pairs at p. Holds when L_{xi_j} f = 0.
    """
    thetas = _check_thetas(S, thetas)
    deformed = type2(S, thetas, check=False)
    frame = coordinate_frame(S.chart)
    before = nijenhuis(S.f)
    after = nijenhuis(deformed.f)
    worst = 0.0
    for a in range(len(frame)):
        for b in range(a + 1, len(frame)):
            torsion = before(frame[a], frame[b], p)
            expected = torsion - sum(float(theta.value(p) @ torsion) * xi.value(p)
                                     for theta, xi in zip(thetas, S.xi))
            worst = max(worst, float(np.max(np.abs(after(frame[a], frame[b], p) - expected))))
    return worst

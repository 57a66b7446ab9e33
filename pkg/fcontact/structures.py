import enum
import functools
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from .calculus import d_oneform_matrix, lie_bracket, lie_derivative_metric_matrix, \
    lie_derivative_t11_matrix, nijenhuis
from .chart import Chart, sample_points
from .constants import DEFAULT_TOLERANCE, FD_STEP, FD_TOLERANCE, GRAM_FLOOR, \
    POSITIVE_DEFINITE_FLOOR
from .exceptions import DimensionError, DomainError
from .fields import Metric, OneForm, Tensor11, VectorField, coordinate_frame, fd_residual

_logger = logging.getLogger(__name__)


class Level(enum.IntEnum):
    NONE = 0
    METRIC_F = 1
    F_CONTACT = 2
    F_K_CONTACT = 3
    S = 4

    @property
    def label(self):
        return _LEVEL_LABELS[self]

    @classmethod
    def parse(cls, value):
        if isinstance(value, Level):
            return value
        for level, label in _LEVEL_LABELS.items():
            if value == label or str(value).lower() == label.lower():
                return level
        raise ValueError(f"Unknown verification level {value!r}; "
                         f"expected one of {list(_LEVEL_LABELS.values())}")


_LEVEL_LABELS = {
    Level.NONE: 'none',
    Level.METRIC_F: 'metric-f',
    Level.F_CONTACT: 'f-contact',
    Level.F_K_CONTACT: 'f-K-contact',
    Level.S: 'S',
}


@dataclass(frozen=True)
class FStructure:
    """
    The tensors (f, xi_1..xi_s, eta_1..eta_s, g) of a metric f-structure
    on a chart of dimension 2n + s.
    """
    n: int
    s: int
    chart: Chart
    f: Tensor11
    xi: Tuple[VectorField, ...]
    eta: Tuple[OneForm, ...]
    g: Metric
    label: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'xi', tuple(self.xi))
        object.__setattr__(self, 'eta', tuple(self.eta))
        if self.n < 0 or self.s < 1:
            raise DimensionError(f"Need n >= 0 and s >= 1, got n={self.n}, s={self.s}")
        if self.chart.dim != 2 * self.n + self.s:
            raise DimensionError(f"Chart dimension {self.chart.dim} is not 2n+s = {2 * self.n + self.s}")
        if len(self.xi) != self.s or len(self.eta) != self.s:
            raise DimensionError(f"Expected {self.s} characteristic fields and one-forms, "
                                 f"got {len(self.xi)} and {len(self.eta)}")
        for tensor in (self.f, self.g) + self.xi + self.eta:
            if tensor.chart.dim != self.chart.dim:
                raise DimensionError(f"{tensor!r} lives on a {tensor.chart.dim}-dimensional chart, "
                                     f"structure chart has dimension {self.chart.dim}")

    @property
    def dim(self):
        return self.chart.dim

    def with_tensors(self, **changes):
        return replace(self, **changes)

    def components(self, p):
        """Values of every structure tensor at p."""
        return {
            'f': self.f.value(p),
            'xi': np.array([xi.value(p) for xi in self.xi]),
            'eta': np.array([eta.value(p) for eta in self.eta]),
            'g': self.g.value(p),
        }

    def magnitude(self, p):
        return max(float(np.max(np.abs(value))) for value in self.components(p).values())

    def fundamental_form(self, X, Y, p):
        return fundamental_form(self)(X, Y, p)

    def __repr__(self):
        return f"FStructure({self.label or '<anonymous>'}, n={self.n}, s={self.s})"


def fundamental_form(S):
    """omega(X, Y) = g(X, fY)."""
    def evaluate(X, Y, p):
        return float(X.value(p) @ S.g.value(p) @ S.f.value(p) @ Y.value(p))
    return evaluate


def omega_matrix(S, p):
    """Components omega(d_a, d_b) = (g f)_ab."""
    return S.g.value(p) @ S.f.value(p)


class _PointData:
    """Lazily evaluated tensors of one structure at one point."""

    def __init__(self, S, p):
        self.S = S
        self.p = p

    @functools.cached_property
    def F(self):
        return self.S.f.value(self.p)

    @functools.cached_property
    def G(self):
        return self.S.g.value(self.p)

    @functools.cached_property
    def E(self):
        return np.array([eta.value(self.p) for eta in self.S.eta])

    @functools.cached_property
    def X(self):
        return np.array([xi.value(self.p) for xi in self.S.xi]).T

    @functools.cached_property
    def omega(self):
        return self.G @ self.F

    @functools.cached_property
    def d_eta(self):
        return [d_oneform_matrix(eta, self.p) for eta in self.S.eta]


def _upper(matrix):
    rows, cols = np.triu_indices(matrix.shape[0], k=1)
    return matrix[rows, cols]


def _max_abs(values):
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(values))) if values.size else 0.0


def _duality(d):
    return _max_abs(d.E @ d.X - np.eye(d.S.s))


def _eta_independence(d):
    return max(0.0, GRAM_FLOOR - float(np.linalg.det(d.E @ d.E.T)))


def _f_kills_xi(d):
    return _max_abs(d.F @ d.X)


def _f_squared(d):
    return _max_abs(d.F @ d.F + np.eye(d.S.dim) - d.X @ d.E)


def _image_in_kernel(d):
    return _max_abs(d.E @ d.F)


def _metric_symmetric(d):
    return _max_abs(d.G - d.G.T)


def _metric_positive(d):
    smallest = float(np.linalg.eigvalsh(0.5 * (d.G + d.G.T))[0])
    return max(0.0, POSITIVE_DEFINITE_FLOOR - smallest)


def _compatibility(d):
    return _max_abs(d.F.T @ d.G @ d.F - d.G + d.E.T @ d.E)


def _contact(d):
    return max(_max_abs(_upper(d_eta - d.omega)) for d_eta in d.d_eta)


def _commuting(d):
    xi = d.S.xi
    brackets = [lie_bracket(xi[i], xi[j], d.p) for i in range(len(xi)) for j in range(i + 1, len(xi))]
    return _max_abs(brackets)


def _killing(d):
    return max(_max_abs(lie_derivative_metric_matrix(xi, d.S.g, d.p)) for xi in d.S.xi)


def _f_invariance(d):
    return max(_max_abs(lie_derivative_t11_matrix(xi, d.S.f, d.p)) for xi in d.S.xi)


def _normality(d):
    frame = coordinate_frame(d.S.chart)
    torsion = nijenhuis(d.S.f)
    worst = 0.0
    for a in range(len(frame)):
        for b in range(a + 1, len(frame)):
            value = torsion(frame[a], frame[b], d.p)
            for d_eta, xi in zip(d.d_eta, d.X.T):
                value = value + 2.0 * d_eta[a, b] * xi
            worst = max(worst, _max_abs(value))
    return worst


@dataclass(frozen=True)
class _Check:
    name: str
    level: Level
    fn: object
    floor: bool = False


CHECKS = (
    _Check('duality', Level.METRIC_F, _duality),
    _Check('eta_independence', Level.METRIC_F, _eta_independence, floor=True),
    _Check('f_kills_xi', Level.METRIC_F, _f_kills_xi),
    _Check('f_squared', Level.METRIC_F, _f_squared),
    _Check('image_in_kernel', Level.METRIC_F, _image_in_kernel),
    _Check('metric_symmetric', Level.METRIC_F, _metric_symmetric),
    _Check('metric_positive', Level.METRIC_F, _metric_positive, floor=True),
    _Check('compatibility', Level.METRIC_F, _compatibility),
    _Check('contact', Level.F_CONTACT, _contact),
    _Check('commuting', Level.F_CONTACT, _commuting),
    _Check('killing', Level.F_K_CONTACT, _killing),
    _Check('f_invariance', Level.F_K_CONTACT, _f_invariance),
    _Check('normality', Level.S, _normality),
)


@dataclass
class AxiomResult:
    name: str
    level: Optional[Level]
    residual: Optional[float] = 0.0
    passed: bool = True
    evaluated: bool = True

    def record(self, residual, passed):
        if self.evaluated:
            self.residual = max(self.residual, residual)
        self.passed = self.passed and passed

    def mark_not_evaluated(self):
        self.evaluated = False
        self.residual = None
        self.passed = False

    def to_dict(self):
        return {
            'level': self.level.label if self.level is not None else None,
            'residual': self.residual,
            'passed': self.passed,
            'evaluated': self.evaluated,
        }


@dataclass
class VerificationReport:
    requested: Level
    achieved: Level
    sample_count: int
    tolerance: float
    axioms: Dict[str, AxiomResult] = field(default_factory=dict)

    @property
    def passed(self):
        extra_ok = all(axiom.passed for axiom in self.axioms.values() if axiom.level is None)
        return self.achieved >= self.requested and extra_ok

    def residual(self, name):
        return self.axioms[name].residual

    def to_dict(self):
        return {
            'requested': self.requested.label,
            'achieved': self.achieved.label,
            'passed': self.passed,
            'samples': self.sample_count,
            'tolerance': self.tolerance,
            'axioms': {name: axiom.to_dict() for name, axiom in self.axioms.items()},
        }


def verify(S, level=Level.S, samples=None, tol=DEFAULT_TOLERANCE, fd_check=False):
    """
    Check the axioms of every level up to `level` at the sample points.

    Every residual is reported, also past the first failure. A point passes
    an identity when raw residual <= tol * (1 + M(p)), M(p) being the largest
    structure component at p; floor checks pass when their residual is zero.
    """
    level = Level.parse(level)
    points = list(samples) if samples is not None else sample_points(S.chart)
    if not points:
        raise ValueError("verify needs at least one sample point")
    checks = [check for check in CHECKS if check.level <= level]
    results = {check.name: AxiomResult(check.name, check.level) for check in checks}
    if fd_check:
        results['fd_consistency'] = AxiomResult('fd_consistency', None)

    for p in points:
        try:
            scale = S.magnitude(p)
        except DomainError as e:
            _logger.warning(f"Structure {S.label} is singular at {p.tolist()}: {e}")
            for result in results.values():
                result.mark_not_evaluated()
            continue
        data = _PointData(S, p)
        for check in checks:
            result = results[check.name]
            try:
                residual = check.fn(data)
            except DomainError as e:
                _logger.warning(f"Axiom {check.name} not evaluated at {p.tolist()}: {e}")
                result.mark_not_evaluated()
                continue
            passed = residual == 0.0 if check.floor else residual <= tol * (1.0 + scale)
            result.record(residual, passed)
        if fd_check:
            tensors = (S.f, S.g) + S.xi + S.eta
            try:
                residual = max(fd_residual(tensor, p, FD_STEP) for tensor in tensors)
            except DomainError:
                results['fd_consistency'].mark_not_evaluated()
                continue
            results['fd_consistency'].record(residual, residual <= FD_TOLERANCE)

    achieved = Level.NONE
    for candidate in (Level.METRIC_F, Level.F_CONTACT, Level.F_K_CONTACT, Level.S):
        if candidate > level:
            break
        if all(results[check.name].passed for check in checks if check.level <= candidate):
            achieved = candidate
        else:
            break

    report = VerificationReport(level, achieved, len(points), tol, results)
    failed = [name for name, result in results.items() if not result.passed]
    if failed:
        _logger.warning(f"Structure {S.label} reached level {achieved.label}; failed axioms: {failed}")
    else:
        _logger.info(f"Structure {S.label} reached level {achieved.label} on {len(points)} samples")
    return report


def compare_structures(first, second, points):
    """Largest componentwise difference of f, xi, eta and g at the points."""
    if first.dim != second.dim or first.s != second.s:
        raise DimensionError(f"Cannot compare {first!r} with {second!r}")
    differences = {'f': 0.0, 'xi': 0.0, 'eta': 0.0, 'g': 0.0}
    for p in points:
        left = first.components(p)
        right = second.components(p)
        for name in differences:
            differences[name] = max(differences[name], _max_abs(left[name] - right[name]))
    return differences

"""
Lifting an s-structure on M to an (s+1)-structure on M x R, the deck
transformations (p, t) -> (phi(p), t + t0) of the mapping torus, and the
restriction of a lifted structure to the slice {t = 0}.

The quotient is never built; descent is checked as invariance of the lifted
tensors under the deck transformation on the cover.
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .chart import Chart, sample_points
from .constants import DEFAULT_BOX, LEAF_TOLERANCE, LIFT_COORDINATE
from .dual import Jet
from .exceptions import ChartError, DimensionError, PreconditionError
from .expr import BinOp, Num, Var, eval_dual, evaluate, parse, relabel, to_text
from .fields import Metric, OneForm, Tensor11, VectorField, compose, field_einsum, outer, \
    tensor_product
from .structures import FStructure

_logger = logging.getLogger(__name__)

_RENAMED_LIFT_COORDINATE = re.compile(rf'^{LIFT_COORDINATE}_(\d+)$')


class AutomorphismMap:
    """
    A map phi of the chart into itself given by one expression per
    coordinate, with optional expressions for its inverse.
    """

    def __init__(self, chart, exprs, inverse=None, label=None):
        exprs = tuple(exprs)
        if len(exprs) != chart.dim:
            raise DimensionError(f"A map of a {chart.dim}-dimensional chart needs {chart.dim} "
                                 f"component expressions, got {len(exprs)}")
        if inverse is not None and len(inverse) != chart.dim:
            raise DimensionError(f"Inverse of a map of a {chart.dim}-dimensional chart needs "
                                 f"{chart.dim} component expressions, got {len(inverse)}")
        self.chart = chart
        self.exprs = exprs
        self.inverse_exprs = tuple(inverse) if inverse is not None else None
        self.label = label or 'phi'

    @classmethod
    def parse(cls, chart, texts, inverse=None, params=None, label=None):
        exprs = [parse(text, chart, params) for text in texts]
        inverse_exprs = [parse(text, chart, params) for text in inverse] if inverse is not None else None
        return cls(chart, exprs, inverse_exprs, label)

    @classmethod
    def identity(cls, chart):
        return cls(chart, [Var(name, k) for k, name in enumerate(chart.coord_names)],
                   [Var(name, k) for k, name in enumerate(chart.coord_names)], label='id')

    @property
    def has_inverse(self):
        return self.inverse_exprs is not None

    def inverse(self):
        if not self.has_inverse:
            raise PreconditionError(f"Map {self.label} has no inverse expressions")
        return AutomorphismMap(self.chart, self.inverse_exprs, self.exprs, label=f"{self.label}^-1")

    def __call__(self, p):
        p = self.chart.point(p)
        return np.array([evaluate(e, p) for e in self.exprs])

    def jacobian(self, p):
        """Value phi(p) and the matrix D phi[a, b] = d phi^a / d x^b."""
        p = self.chart.point(p)
        duals = [eval_dual(e, p) for e in self.exprs]
        return np.array([d.value for d in duals]), np.array([d.partials for d in duals])

    def on_chart(self, chart):
        """The same map, with coordinate variables renamed to `chart`."""
        if chart.dim != self.chart.dim:
            raise DimensionError(f"Cannot move a map of a {self.chart.dim}-dimensional chart "
                                 f"to a {chart.dim}-dimensional one")
        names = chart.coord_names
        inverse = [relabel(e, names) for e in self.inverse_exprs] if self.has_inverse else None
        return AutomorphismMap(chart, [relabel(e, names) for e in self.exprs], inverse, self.label)

    def to_dict(self):
        return {
            'label': self.label,
            'map': [to_text(e) for e in self.exprs],
            'inverse': [to_text(e) for e in self.inverse_exprs] if self.has_inverse else None,
        }

    def __repr__(self):
        return f"AutomorphismMap({self.label}, {[to_text(e) for e in self.exprs]})"


@dataclass
class InvarianceReport:
    label: str
    tolerance: float
    residuals: Dict[str, float] = field(default_factory=dict)
    failed: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failed

    def to_dict(self):
        return {
            'map': self.label,
            'tolerance': self.tolerance,
            'residuals': dict(self.residuals),
            'failed': list(self.failed),
            'passed': self.passed,
        }


def _pullback_residuals(S, phi, p):
    """Raw residuals of the four pullback identities of phi at p."""
    image, J = phi.jacobian(p)
    here = S.components(p)
    there = S.components(image)
    scale = 1.0 + max(S.magnitude(p), S.magnitude(image))
    residuals = {
        'eta': float(np.max(np.abs(there['eta'] @ J - here['eta']))),
        'metric': float(np.max(np.abs(J.T @ there['g'] @ J - here['g']))),
        'f': float(np.max(np.abs(J @ here['f'] - there['f'] @ J))),
        'xi': float(np.max(np.abs(here['xi'] @ J.T - there['xi']))),
    }
    return residuals, scale


def check_automorphism(S, phi, samples=None, tol=1e-10):
    """
    Check phi^* eta_i = eta_i, phi^* g = g, D phi o f = f o D phi and
    D phi(xi_i) = xi_i o phi at the samples, for phi and for its inverse
    when one is given. The composition phi(phi^-1(p)) = p is checked to 1e-9.
    """
    if phi.chart.dim != S.dim:
        raise DimensionError(f"Map of a {phi.chart.dim}-dimensional chart cannot act on {S!r}")
    samples = sample_points(S.chart) if samples is None else samples
    maps = [('', phi)]
    if phi.has_inverse:
        maps.append(('inverse_', phi.inverse()))
    report = InvarianceReport(phi.label, tol)
    for prefix, current in maps:
        worst = {}
        for p in samples:
            residuals, scale = _pullback_residuals(S, current, p)
            for name, value in residuals.items():
                key = prefix + name
                worst[key] = max(worst.get(key, 0.0), value)
                if value > tol * scale and key not in report.failed:
                    report.failed.append(key)
        report.residuals.update(worst)
    if phi.has_inverse:
        inverse = phi.inverse()
        roundtrip = max(float(np.max(np.abs(phi(inverse(p)) - p))) for p in samples)
        report.residuals['roundtrip'] = roundtrip
        if roundtrip > LEAF_TOLERANCE:
            report.failed.append('roundtrip')
    if report.passed:
        _logger.info(f"{phi.label} preserves {S.label}; largest residual "
                     f"{max(report.residuals.values()):.3e}")
    else:
        _logger.warning(f"{phi.label} fails to preserve {S.label}: {report.failed}")
    return report


def _next_free_name(names):
    k = 1
    while f"{LIFT_COORDINATE}_{k}" in names:
        k += 1
    return f"{LIFT_COORDINATE}_{k}"


def lifted_chart(chart):
    """
    The chart of M x R: the coordinate `t` is appended with interval (-1, 1);
    an existing `t` is first renamed to the next free `t_k`.
    """
    names = list(chart.coord_names)
    if LIFT_COORDINATE in names:
        names[names.index(LIFT_COORDINATE)] = _next_free_name(names)
    return Chart(names, chart.box).extended(LIFT_COORDINATE, DEFAULT_BOX)


def sliced_chart(chart):
    """Inverse of `lifted_chart`."""
    if chart.coord_names[-1] != LIFT_COORDINATE or chart.dim < 2:
        raise ChartError(f"Cannot slice {chart}: the last coordinate must be {LIFT_COORDINATE!r}")
    names = list(chart.coord_names[:-1])
    renamed = [(int(m.group(1)), i) for i, name in enumerate(names)
               for m in [_RENAMED_LIFT_COORDINATE.match(name)] if m]
    if renamed:
        _, position = max(renamed)
        names[position] = LIFT_COORDINATE
    return Chart(names, chart.box[:-1])


def _padded_jet(jet):
    """A jet on M seen on M x R: zero t components, zero t derivatives."""
    ndim = jet.value.ndim
    value = np.pad(jet.value, [(0, 1)] * ndim)
    partials = np.pad(jet.partials, [(0, 1)] * (ndim + 1))
    return Jet(value, partials)


def _restricted_jet(jet):
    """A jet on M x R read on the slice: t components and t derivatives dropped."""
    index = (np.s_[:-1],) * (jet.value.ndim + 1)
    return Jet(jet.value[index[:-1]], jet.partials[index])


def _padded(field, chart):
    base_dim = field.chart.dim
    return type(field)(chart, lambda p: _padded_jet(field.jet(p[:base_dim])), label=field.label)


def _restricted(field, chart):
    def jet_fn(p):
        return _restricted_jet(field.jet(np.append(p, 0.0)))
    return type(field)(chart, jet_fn, label=field.label)


def _projector(chart, eta, xi):
    """P = id - sum eta_a (x) xi_a."""
    identity = Tensor11.constant(chart, np.eye(chart.dim), label='id')
    pieces = [identity] + [tensor_product(e, x) for e, x in zip(eta, xi)]
    return Tensor11.combination([1.0] + [-1.0] * len(eta), pieces, label='P')


def _completed_metric(chart, g, projector, eta, label):
    """g(P., P.) + sum eta_a (x) eta_a."""
    horizontal = field_einsum(Metric, 'ca,cd,db->ab', projector, g, projector)
    pieces = [horizontal] + [outer(e, e) for e in eta]
    return Metric.combination([1.0] * len(pieces), pieces, label=label)


def lift(S):
    """
    The (s+1)-structure on M x R:
    eta-bar_a = eta_a, eta-bar_{s+1} = dt + (1/s) sum eta_a,
    xi-bar_a = xi_a - (1/s) d/dt, xi-bar_{s+1} = d/dt, f-bar = f (0 on d/dt),
    and g-bar completed from g through the projector P = id - sum eta-bar (x) xi-bar.
    """
    chart = lifted_chart(S.chart)
    s = S.s
    dt = OneForm.constant(chart, np.eye(chart.dim)[-1], label='dt')
    d_t = VectorField.constant(chart, np.eye(chart.dim)[-1], label='d/dt')
    eta = [_padded(e, chart) for e in S.eta]
    eta.append(OneForm.combination([1.0 / s] * s + [1.0], eta + [dt], label=f"eta{s + 1}"))
    xi = [VectorField.combination([1.0, -1.0 / s], [_padded(x, chart), d_t], label=x.label) for x in S.xi]
    xi.append(d_t)
    f = _padded(S.f, chart)
    g = _completed_metric(chart, _padded(S.g, chart), _projector(chart, eta, xi), eta, label='g-bar')
    _logger.info(f"Lifted {S.label} to the {chart.dim}-dimensional chart {list(chart.coord_names)}")
    return FStructure(S.n, s + 1, chart, f, tuple(xi), tuple(eta), g, label=f"lift({S.label})")


def projector_residual(S, p):
    """Largest |P + f^2| at p, with P = id - sum eta_a (x) xi_a."""
    P = np.eye(S.dim) - sum(np.outer(xi.value(p), eta.value(p)) for xi, eta in zip(S.xi, S.eta))
    F = S.f.value(p)
    return float(np.max(np.abs(P + F @ F)))


def closed_form(S):
    """The one-form eta_{s} - (1/(s-1)) sum_{a<s} eta_a whose kernel the slice must be tangent to."""
    if S.s < 2:
        raise PreconditionError(f"Slicing needs s >= 2, structure has s={S.s}")
    k = S.s - 1
    return OneForm.combination([-1.0 / k] * k + [1.0], S.eta, label='eta')


def slice(S, samples=None):
    """
    Restrict a lifted structure to {t = 0}:
    eta-bar_a = eta_a on the slice, xi-bar_a = xi_a + (1/s) xi_{s+1} read on the slice,
    f-bar = f P and g-bar = g(P., P.) + sum eta-bar (x) eta-bar with P = id - sum eta-bar (x) xi-bar.
    """
    base = sliced_chart(S.chart)
    form = closed_form(S)
    s = S.s - 1
    points = sample_points(base) if samples is None else samples
    leaf = max(float(np.max(np.abs(form.value(np.append(p, 0.0))[:-1]))) for p in points)
    if leaf > LEAF_TOLERANCE:
        raise PreconditionError(f"Slice t = 0 is not a leaf of ker eta: non-t components up to {leaf:.3e}",
                                {'leaf': leaf})
    eta = [_restricted(e, base) for e in S.eta[:s]]
    top = _restricted(S.xi[s], base)
    xi = [VectorField.combination([1.0, 1.0 / s], [_restricted(x, base), top], label=x.label)
          for x in S.xi[:s]]
    projector = _projector(base, eta, xi)
    f = compose(_restricted(S.f, base), projector)
    g = _completed_metric(base, _restricted(S.g, base), projector, eta, label='g-bar')
    _logger.info(f"Sliced {S.label} at t = 0 onto {list(base.coord_names)}")
    return FStructure(S.n, s, base, f, tuple(xi), tuple(eta), g, label=f"slice({S.label})")


def deck_transformation(chart, phi, t0):
    """Phi(p, t) = (phi(p), t + t0) on the lifted chart, with its inverse when phi has one."""
    if t0 == 0:
        raise PreconditionError("Deck translation t0 must be nonzero", {'t0': 0.0})
    if phi.chart.dim + 1 != chart.dim:
        raise DimensionError(f"Map of a {phi.chart.dim}-dimensional chart does not lift "
                             f"to the {chart.dim}-dimensional chart")
    names = chart.coord_names[:-1]
    t = Var(chart.coord_names[-1], chart.dim - 1)
    exprs = [relabel(e, names) for e in phi.exprs] + [BinOp('+', t, Num(float(t0)))]
    inverse = None
    if phi.has_inverse:
        inverse = [relabel(e, names) for e in phi.inverse_exprs] + [BinOp('-', t, Num(float(t0)))]
    return AutomorphismMap(chart, exprs, inverse, label=f"({phi.label}, t + {t0})")


def check_deck_invariance(S, phi, t0, samples=None, tol=1e-10):
    """Check that the lifted structure S is invariant under (p, t) -> (phi(p), t + t0)."""
    return check_automorphism(S, deck_transformation(S.chart, phi, t0), samples, tol)

"""
Tensor fields on a chart.

A field is a pure function from points to first-order jets. Fields built
from expressions evaluate their components with dual numbers; composite
fields (deformed, lifted or sliced tensors) are closures over the fields
they come from, so derivatives of composites follow from the product rule
on already-evaluated jets.

Index conventions: a Tensor11 value ``f[a, b]`` is f^a_b, so that
``(fX)^a = f[a, b] X^b``; bilinear forms store ``g[a, b] = g(d_a, d_b)``.
"""
import functools

import numpy as np

from .constants import FD_STEP, JET_CACHE_SIZE
from .dual import Jet
from .exceptions import DimensionError
from .expr import eval_dual as _expr_eval_dual
from .expr import is_constant


class Field:
    kind = 'field'

    def __init__(self, chart, jet_fn, label=None):
        self.chart = chart
        self.label = label
        self._jet_fn = jet_fn
        self._cached_jet = functools.lru_cache(maxsize=JET_CACHE_SIZE)(self._jet_at_key)

    @staticmethod
    def shape_for(dim):
        raise NotImplementedError

    @property
    def shape(self):
        return self.shape_for(self.chart.dim)

    def _jet_at_key(self, key):
        jet = self._jet_fn(np.array(key))
        if jet.shape != self.shape or jet.dim != self.chart.dim:
            raise DimensionError(f"{self.kind} {self.label or ''} produced a jet of shape "
                                 f"{jet.shape} over {jet.dim} coordinates, expected "
                                 f"{self.shape} over {self.chart.dim}")
        return jet

    def jet(self, p):
        p = self.chart.point(p)
        return self._cached_jet(tuple(p.tolist()))

    def value(self, p):
        return self.jet(p).value

    @classmethod
    def from_exprs(cls, chart, exprs, label=None):
        """Field whose components are parsed expressions, nested to the field's shape."""
        shape = cls.shape_for(chart.dim)
        try:
            grid = np.array(exprs, dtype=object)
        except ValueError:
            grid = None
        if grid is None or grid.shape != shape:
            raise DimensionError(f"{cls.kind} on a {chart.dim}-dimensional chart needs "
                                 f"components of shape {shape}")
        flat = list(grid.reshape(-1))
        constants = {i: _expr_eval_dual(e, np.zeros(chart.dim))
                     for i, e in enumerate(flat) if is_constant(e)}

        def jet_fn(p):
            duals = [constants[i] if i in constants else _expr_eval_dual(e, p)
                     for i, e in enumerate(flat)]
            return Jet.stack(duals, shape)

        return cls(chart, jet_fn, label)

    @classmethod
    def constant(cls, chart, values, label=None):
        values = np.asarray(values, dtype=float)
        if values.shape != cls.shape_for(chart.dim):
            raise DimensionError(f"{cls.kind} on a {chart.dim}-dimensional chart needs "
                                 f"components of shape {cls.shape_for(chart.dim)}, got {values.shape}")
        jet = Jet.constant(values, chart.dim)
        return cls(chart, lambda p: jet, label)

    @classmethod
    def combination(cls, coefficients, fields, label=None):
        """Constant-coefficient linear combination of fields of one shape."""
        fields = list(fields)
        coefficients = [float(c) for c in coefficients]
        if len(fields) != len(coefficients) or not fields:
            raise DimensionError(f"{len(coefficients)} coefficients for {len(fields)} fields")
        chart = fields[0].chart
        _check_same_chart(*fields)

        def jet_fn(p):
            total = None
            for c, field in zip(coefficients, fields):
                if c == 0.0:
                    continue
                term = field.jet(p).scale(c)
                total = term if total is None else total + term
            if total is None:
                return Jet.constant(np.zeros(cls.shape_for(chart.dim)), chart.dim)
            return total

        return cls(chart, jet_fn, label)

    def __repr__(self):
        return f"{type(self).__name__}({self.label or '<anonymous>'}, dim={self.chart.dim})"


class ScalarField(Field):
    kind = 'scalar field'

    @staticmethod
    def shape_for(dim):
        return ()


class VectorField(Field):
    kind = 'vector field'

    @staticmethod
    def shape_for(dim):
        return (dim,)


class OneForm(Field):
    kind = 'one-form'

    @staticmethod
    def shape_for(dim):
        return (dim,)


class Tensor11(Field):
    kind = '(1,1)-tensor'

    @staticmethod
    def shape_for(dim):
        return (dim, dim)


class Bilinear(Field):
    kind = 'bilinear form'

    @staticmethod
    def shape_for(dim):
        return (dim, dim)


class Metric(Bilinear):
    kind = 'metric'

    @classmethod
    def from_upper(cls, chart, rows, label=None):
        """Metric from upper-triangle expressions, mirrored below the diagonal."""
        dim = chart.dim
        full = [[None] * dim for _ in range(dim)]
        for a in range(dim):
            for b in range(a, dim):
                full[a][b] = full[b][a] = rows[a][b - a] if len(rows[a]) == dim - a else rows[a][b]
        return cls.from_exprs(chart, full, label)

    def min_eigenvalue(self, p):
        value = self.value(p)
        return float(np.linalg.eigvalsh(0.5 * (value + value.T))[0])


def _check_same_chart(*fields):
    dims = {field.chart.dim for field in fields}
    if len(dims) != 1:
        raise DimensionError(f"Fields live on charts of different dimensions {sorted(dims)}")


def field_einsum(cls, subscripts, *fields, label=None):
    """Composite field whose jet is ``Jet.einsum`` of the operand jets."""
    _check_same_chart(*fields)
    return cls(fields[0].chart, lambda p: Jet.einsum(subscripts, *(f.jet(p) for f in fields)), label)


def coordinate_field(chart, index):
    values = np.zeros(chart.dim)
    values[index] = 1.0
    return VectorField.constant(chart, values, label=f"d/d{chart.coord_names[index]}")


def coordinate_frame(chart):
    return [coordinate_field(chart, k) for k in range(chart.dim)]


def pair(form, vector):
    """The scalar field form(vector)."""
    return field_einsum(ScalarField, 'a,a->', form, vector)


def act(tensor, vector):
    """The vector field T(X)."""
    return field_einsum(VectorField, 'ab,b->a', tensor, vector)


def scaled(scalar, field):
    """The product h * F of a scalar field and any field."""
    indices = 'abcd'[:len(field.shape)]
    return field_einsum(type(field), f',{indices}->{indices}', scalar, field)


def outer(alpha, beta):
    """The bilinear form alpha (x) beta."""
    return field_einsum(Bilinear, 'a,b->ab', alpha, beta)


def compose(first, second):
    """The (1,1)-tensor first o second."""
    return field_einsum(Tensor11, 'ab,bc->ac', first, second)


def form_after(form, tensor):
    """The one-form form o T."""
    return field_einsum(OneForm, 'a,ab->b', form, tensor)


def tensor_product(form, vector):
    """The (1,1)-tensor form (x) vector, i.e. X -> form(X) vector."""
    return field_einsum(Tensor11, 'b,a->ab', form, vector)


def apply(tensor, p, *arguments):
    """
    Evaluate a tensor on tangent vectors at `p`.

    OneForm takes one vector and returns a real, Tensor11 takes one vector
    and returns a vector, bilinear forms take two vectors and return a real.
    """
    value = tensor.value(p)
    vectors = [np.asarray(v, dtype=float) for v in arguments]
    for v in vectors:
        if v.shape != (tensor.chart.dim,):
            raise DimensionError(f"Argument of shape {v.shape} for a {tensor.kind} "
                                 f"on a {tensor.chart.dim}-dimensional chart")
    expected = {OneForm: 1, Tensor11: 1, Bilinear: 2}
    for kind, count in expected.items():
        if isinstance(tensor, kind):
            if len(vectors) != count:
                raise DimensionError(f"A {tensor.kind} takes {count} arguments, got {len(vectors)}")
            if kind is OneForm:
                return float(value @ vectors[0])
            if kind is Tensor11:
                return value @ vectors[0]
            return float(vectors[0] @ value @ vectors[1])
    raise DimensionError(f"Cannot apply a {tensor.kind}")


def eval_dual(field, p):
    """Value and coordinate partials of a scalar field at `p`."""
    return field.jet(p).dual()


def fd_partials(field, p, step=FD_STEP):
    """Central-difference partials of a field's value, shaped like the jet partials."""
    p = field.chart.point(p)
    columns = []
    for k in range(field.chart.dim):
        shift = np.zeros_like(p)
        shift[k] = step
        columns.append((field.value(p + shift) - field.value(p - shift)) / (2.0 * step))
    return np.stack(columns, axis=-1)


def fd_residual(field, p, step=FD_STEP):
    """Largest |AD partial - central difference| scaled by 1 + |value|."""
    jet = field.jet(p)
    scale = 1.0 + (np.max(np.abs(jet.value)) if jet.value.size else 0.0)
    return float(np.max(np.abs(jet.partials - fd_partials(field, p, step)))) / scale

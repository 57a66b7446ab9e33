"""
First-order forward-mode differentiation.

``DualScalar`` carries a value together with its gradient with respect to
the chart coordinates; it is what expression evaluation produces.
``Jet`` is the tensor-valued version used by every tensor field: a value
array of any shape plus a partials array with one extra trailing axis.
"""
import math
import string

import numpy as np

from .exceptions import DomainError


def _frozen(array):
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return array


class DualScalar:
    """A real value and its N partial derivatives."""

    __slots__ = ('value', 'partials')

    def __init__(self, value, partials):
        self.value = float(value)
        self.partials = _frozen(partials)

    @classmethod
    def constant(cls, value, dim):
        return cls(value, np.zeros(dim))

    @classmethod
    def variable(cls, value, index, dim):
        partials = np.zeros(dim)
        partials[index] = 1.0
        return cls(value, partials)

    def _coerce(self, other):
        if isinstance(other, DualScalar):
            return other
        return DualScalar(other, np.zeros_like(self.partials))

    def __add__(self, other):
        other = self._coerce(other)
        return DualScalar(self.value + other.value, self.partials + other.partials)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return DualScalar(self.value - other.value, self.partials - other.partials)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return DualScalar(-self.value, -self.partials)

    def __mul__(self, other):
        other = self._coerce(other)
        return DualScalar(self.value * other.value,
                          self.value * other.partials + other.value * self.partials)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.value == 0.0:
            raise DomainError("Division by zero")
        quotient = self.value / other.value
        return DualScalar(quotient, (self.partials - quotient * other.partials) / other.value)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, np.integer)) or isinstance(exponent, bool):
            raise TypeError(f"Only integer exponents are supported, got {exponent!r}")
        if exponent == 0:
            return DualScalar(1.0, np.zeros_like(self.partials))
        if exponent < 0:
            if self.value == 0.0:
                raise DomainError(f"Zero raised to negative power {exponent}")
        value = self.value ** exponent
        return DualScalar(value, exponent * self.value ** (exponent - 1) * self.partials)

    def sin(self):
        return DualScalar(math.sin(self.value), math.cos(self.value) * self.partials)

    def cos(self):
        return DualScalar(math.cos(self.value), -math.sin(self.value) * self.partials)

    def exp(self):
        try:
            value = math.exp(self.value)
        except OverflowError:
            raise DomainError(f"exp overflows at {self.value}") from None
        return DualScalar(value, value * self.partials)

    def log(self):
        if self.value <= 0.0:
            raise DomainError(f"log of nonpositive value {self.value}")
        return DualScalar(math.log(self.value), self.partials / self.value)

    def __repr__(self):
        return f"DualScalar({self.value!r}, {self.partials.tolist()!r})"


class Jet:
    """
    Value and first partials of a tensor-valued function at a point.

    ``partials[..., k]`` is the derivative of ``value[...]`` along the k-th
    chart coordinate. Both arrays are read-only.
    """

    __slots__ = ('value', 'partials')

    def __init__(self, value, partials):
        self.value = _frozen(value)
        self.partials = _frozen(partials)
        if self.partials.shape[:-1] != self.value.shape:
            raise ValueError(f"Jet partials shape {self.partials.shape} does not "
                             f"extend value shape {self.value.shape}")

    @property
    def dim(self):
        return self.partials.shape[-1]

    @property
    def shape(self):
        return self.value.shape

    @classmethod
    def constant(cls, value, dim):
        value = np.asarray(value, dtype=float)
        return cls(value, np.zeros(value.shape + (dim,)))

    @classmethod
    def stack(cls, duals, shape):
        """Assemble a jet from a flat sequence of DualScalars."""
        dim = duals[0].partials.shape[0] if duals else 0
        value = np.array([d.value for d in duals], dtype=float).reshape(shape)
        partials = np.array([d.partials for d in duals], dtype=float).reshape(shape + (dim,))
        return cls(value, partials)

    def __add__(self, other):
        return Jet(self.value + other.value, self.partials + other.partials)

    def __sub__(self, other):
        return Jet(self.value - other.value, self.partials - other.partials)

    def __neg__(self):
        return Jet(-self.value, -self.partials)

    def scale(self, factor):
        return Jet(factor * self.value, factor * self.partials)

    def directional(self, vector):
        """Derivative of the value along a tangent vector."""
        return self.partials @ np.asarray(vector, dtype=float)

    def dual(self):
        if self.value.shape != ():
            raise ValueError(f"Only scalar jets convert to DualScalar, shape is {self.value.shape}")
        return DualScalar(float(self.value), self.partials)

    @staticmethod
    def einsum(subscripts, *jets):
        """
        ``numpy.einsum`` on jet values, with partials from the product rule.

        Subscripts must be explicit (``'ab,b->a'``); scalar operands use an
        empty term (``',a->a'``).
        """
        inputs, output = subscripts.replace(' ', '').split('->')
        terms = inputs.split(',')
        if len(terms) != len(jets):
            raise ValueError(f"Subscripts {subscripts!r} expect {len(terms)} operands, got {len(jets)}")
        free = next(c for c in string.ascii_letters if c not in subscripts)
        values = [jet.value for jet in jets]
        value = np.einsum(subscripts, *values)
        partials = np.zeros(np.shape(value) + (jets[0].dim,))
        for i, jet in enumerate(jets):
            if not jet.partials.any():
                continue
            derived_terms = list(terms)
            derived_terms[i] = terms[i] + free
            operands = list(values)
            operands[i] = jet.partials
            partials = partials + np.einsum(f"{','.join(derived_terms)}->{output}{free}", *operands)
        return Jet(value, partials)

    def __repr__(self):
        return f"Jet(value={self.value.tolist()!r}, partials={self.partials.tolist()!r})"

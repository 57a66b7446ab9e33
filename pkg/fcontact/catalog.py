"""
Built-in example structures.

The models live on R^{2n+s} with coordinates x1..xn, y1..yn and the
vertical coordinates z (or z1..zs):

    eta_a = 1/2 (dz_a - sum_i y_i dx_i),    xi_a = 2 d/dz_a,
    f(d/dx_i) = -d/dy_i,  f(d/dy_i) = d/dx_i + y_i sum_a d/dz_a,
    g = sum_a eta_a (x) eta_a + 1/4 sum_i (dx_i^2 + dy_i^2).

The constants 1/2, 2 and 1/4 make d eta_a = omega hold with the 1/2 factor
in the exterior derivative.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Tuple

import numpy as np

from .config import StructureConfig
from .exceptions import CatalogError
from .fields import OneForm
from .mapping_torus import AutomorphismMap, lift
from .structures import FStructure, Level

_logger = logging.getLogger(__name__)

_ROTATION_ANGLE = 0.5


def _number(value):
    return repr(float(value))


def model_coordinates(n, vertical):
    return [f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)] + list(vertical)


def model_config(n, vertical, label):
    """StructureConfig document of the model with the given vertical coordinates."""
    s = len(vertical)
    names = model_coordinates(n, vertical)
    N = len(names)
    x = list(range(n))
    y = list(range(n, 2 * n))
    z = list(range(2 * n, N))

    f = [['0'] * N for _ in range(N)]
    for i in range(n):
        f[x[i]][y[i]] = '1'
        f[y[i]][x[i]] = '-1'
        for a in z:
            f[a][y[i]] = names[y[i]]

    xi = [['0'] * N for _ in range(s)]
    eta = [['0'] * N for _ in range(s)]
    for alpha, a in enumerate(z):
        xi[alpha][a] = '2'
        eta[alpha][a] = '0.5'
        for i in range(n):
            eta[alpha][x[i]] = f"-0.5*{names[y[i]]}"

    g = [['0'] * N for _ in range(N)]
    for i in range(n):
        for j in range(n):
            term = f"{_number(s / 4)}*{names[y[i]]}*{names[y[j]]}"
            g[x[i]][x[j]] = f"{term} + 0.25" if i == j else term
        g[y[i]][y[i]] = '0.25'
        for a in z:
            g[x[i]][a] = g[a][x[i]] = f"-0.25*{names[y[i]]}"
    for a in z:
        g[a][a] = '0.25'

    return {
        'chart': {'dim': N, 'coords': names, 'box': [[-1.0, 1.0]] * N},
        'n': n, 's': s, 'f': f, 'xi': xi, 'eta': eta, 'g': g, 'label': label,
    }


def horizontal_thetas(chart, n, coefficients, label='theta'):
    """
    Constant one-forms theta_a = sum_i (c[a, i] dx_i + c[a, n + i] dy_i), one per
    row of `coefficients` (shape s x 2n), on a chart whose first 2n coordinates are x, y.
    """
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.ndim != 2 or coefficients.shape[1] != 2 * n:
        raise CatalogError(f"Horizontal one-forms need coefficients of shape (s, {2 * n}), "
                           f"got {coefficients.shape}")
    thetas = []
    for a, row in enumerate(coefficients):
        values = np.zeros(chart.dim)
        values[:2 * n] = row
        thetas.append(OneForm.constant(chart, values, label=f"{label}{a + 1}"))
    return tuple(thetas)


def _shift_texts(names, targets, amount):
    return [f"{name} + {_number(amount)}" if name in targets else name for name in names]


def _rotation_texts(names, vertical, angle):
    c, s_ = f"cos({angle})", f"sin({angle})"
    rotated = {
        'x1': f"x1*{c} - y1*{s_}",
        'y1': f"x1*{s_} + y1*{c}",
    }
    correction = f"(-x1*y1/2 + ({rotated['x1']})*({rotated['y1']})/2)"
    return [rotated.get(name, f"{name} + {correction}" if name in vertical else name) for name in names]


def model_automorphisms(chart, n, vertical, lifts=()):
    """
    Vertical translations, translations along the lift coordinates and, for
    n >= 1, the rotation of the (x1, y1)-plane corrected along the vertical
    coordinates so that it preserves every eta_a.
    """
    names = list(chart.coord_names)
    maps = [AutomorphismMap.parse(chart, _shift_texts(names, vertical, 1.0),
                                  _shift_texts(names, vertical, -1.0), label='z-translation')]
    for name in lifts:
        maps.append(AutomorphismMap.parse(chart, _shift_texts(names, [name], 1.0),
                                          _shift_texts(names, [name], -1.0), label=f"{name}-translation"))
    if n >= 1:
        params = {'theta': _ROTATION_ANGLE}
        maps.append(AutomorphismMap.parse(chart, _rotation_texts(names, vertical, 'theta'),
                                          _rotation_texts(names, vertical, '(-theta)'),
                                          params=params, label='xy-rotation'))
    return maps


def model_non_automorphisms(chart, n):
    """Maps that do not preserve the model: the dilation x1 -> 2 x1."""
    if n < 1:
        return []
    names = list(chart.coord_names)
    forward = ['2*x1' if name == 'x1' else name for name in names]
    backward = ['x1/2' if name == 'x1' else name for name in names]
    return [AutomorphismMap.parse(chart, forward, backward, label='x1-dilation')]


_DEFAULT_THETA_ROWS = ((0.5, -0.25, 0.0, 0.0), (-0.3, 0.2, 0.0, 0.0), (0.1, 0.4, 0.0, 0.0),
                       (0.0, -0.6, 0.0, 0.0))


def default_theta_coefficients(n, s):
    """A fixed family of horizontal coefficients, shape s x 2n."""
    coefficients = np.zeros((s, 2 * n))
    for a in range(s):
        row = _DEFAULT_THETA_ROWS[a % len(_DEFAULT_THETA_ROWS)]
        for i in range(n):
            coefficients[a, i] = row[0] / (i + 1)
            coefficients[a, n + i] = row[1] / (i + 1)
    return coefficients


@dataclass(frozen=True)
class CatalogStructure:
    """A catalog structure together with its companion one-forms and maps."""
    name: str
    params: Dict[str, int]
    structure: FStructure
    level: Level
    config: dict = None
    automorphisms: Tuple[AutomorphismMap, ...] = ()
    non_automorphisms: Tuple[AutomorphismMap, ...] = ()
    theta_coefficients: np.ndarray = None

    @property
    def n(self):
        return self.structure.n

    def thetas(self, coefficients=None):
        """Constant horizontal one-forms; the default family when no coefficients are given."""
        if coefficients is None:
            coefficients = self.theta_coefficients
        return horizontal_thetas(self.structure.chart, self.n, coefficients)

    def automorphism(self, label):
        for phi in self.automorphisms + self.non_automorphisms:
            if phi.label == label:
                return phi
        raise CatalogError(f"{self.name} has no map {label!r}; known maps: "
                           f"{[phi.label for phi in self.automorphisms + self.non_automorphisms]}")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    level: Level
    defaults: Dict[str, int]
    limits: Dict[str, Tuple[int, int]]
    build: Callable = field(repr=False, default=None)
    config: Callable = field(repr=False, default=None)

    def resolve(self, params):
        params = dict(params or {})
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise CatalogError(f"Unknown parameters {sorted(unknown)} for {self.name}; "
                               f"expected {sorted(self.defaults)}")
        resolved = {**self.defaults, **params}
        for key, value in resolved.items():
            low, high = self.limits[key]
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or not low <= value <= high:
                raise CatalogError(f"Parameter {key}={value!r} of {self.name} must be an integer "
                                   f"in [{low}, {high}]")
        return {key: int(value) for key, value in resolved.items()}

    def to_dict(self):
        return {
            'name': self.name,
            'description': self.description,
            'level': self.level.label,
            'defaults': dict(self.defaults),
            'limits': {key: list(bounds) for key, bounds in self.limits.items()},
        }


def _build_model(name, n, vertical):
    document = model_config(n, vertical, f"{name}(n={n}, s={len(vertical)})")
    structure = StructureConfig.model_validate(document).build()
    chart = structure.chart
    return CatalogStructure(
        name=name, params={}, structure=structure, level=Level.S, config=document,
        automorphisms=tuple(model_automorphisms(chart, n, vertical)),
        non_automorphisms=tuple(model_non_automorphisms(chart, n)),
        theta_coefficients=default_theta_coefficients(n, len(vertical)))


def _sasakian(n):
    return _build_model('sasakian-model', n, ['z'])


def _s_model(n, s):
    return _build_model('s-model', n, [f"z{a}" for a in range(1, s + 1)])


def _lifted(n, k):
    structure = _sasakian(n).structure
    for _ in range(k):
        structure = lift(structure)
    chart = structure.chart
    lifts = list(chart.coord_names[2 * n + 1:])
    return CatalogStructure(
        name='lifted-k', params={}, structure=structure, level=Level.S, config=None,
        automorphisms=tuple(model_automorphisms(chart, n, ['z'], lifts)),
        non_automorphisms=tuple(model_non_automorphisms(chart, n)),
        theta_coefficients=default_theta_coefficients(n, structure.s))


_ENTRIES = {
    entry.name: entry for entry in (
        CatalogEntry(
            'sasakian-model',
            'Sasakian structure on R^{2n+1} (s = 1)',
            Level.S, {'n': 1}, {'n': (0, 4)},
            build=lambda n: _sasakian(n),
            config=lambda n: model_config(n, ['z'], f"sasakian-model(n={n}, s=1)")),
        CatalogEntry(
            's-model',
            'S-structure on R^{2n+s}; for n = 0 the flat structure with f = 0',
            Level.S, {'n': 1, 's': 2}, {'n': (0, 4), 's': (1, 4)},
            build=lambda n, s: _s_model(n, s),
            config=lambda n, s: model_config(n, [f"z{a}" for a in range(1, s + 1)],
                                             f"s-model(n={n}, s={s})")),
        CatalogEntry(
            'lifted-k',
            'The Sasakian model on R^{2n+1} lifted k times to R^{2n+1+k} (s = 1 + k)',
            Level.S, {'n': 1, 'k': 1}, {'n': (1, 4), 'k': (1, 3)},
            build=lambda n, k: _lifted(n, k)),
    )
}


def list_entries():
    return [entry.to_dict() for entry in _ENTRIES.values()]


def entry(name):
    try:
        return _ENTRIES[name]
    except KeyError:
        raise CatalogError(f"Unknown catalog entry {name!r}; known entries: {sorted(_ENTRIES)}") from None


def get(name, params=None):
    """Build the named catalog structure with its companions."""
    catalog_entry = entry(name)
    resolved = catalog_entry.resolve(params)
    item = catalog_entry.build(**resolved)
    _logger.info(f"Built catalog structure {name} with {resolved}")
    return replace(item, params=resolved)


def show(name, params=None):
    """Description of an entry; includes the structure document when one exists."""
    catalog_entry = entry(name)
    resolved = catalog_entry.resolve(params)
    description = {**catalog_entry.to_dict(), 'params': resolved}
    if catalog_entry.config is not None:
        description['structure'] = catalog_entry.config(**resolved)
    else:
        description['construction'] = f"lift applied {resolved['k']} times to sasakian-model(n={resolved['n']})"
    return description

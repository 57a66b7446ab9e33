import logging
import re

import numpy as np

from .constants import DEFAULT_BOX, DEFAULT_SAMPLE_COUNT, DEFAULT_SEED
from .exceptions import ChartError, DimensionError

_logger = logging.getLogger(__name__)

_IDENTIFIER = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


class Chart:
    """
    An open coordinate box in R^N with named coordinates.

    Component functions are defined on all of R^N; the box only bounds
    where sample points are drawn.
    """

    def __init__(self, coord_names, box=None):
        coord_names = tuple(coord_names)
        if len(coord_names) < 1:
            raise ChartError("A chart needs at least one coordinate")
        for name in coord_names:
            if not _IDENTIFIER.match(name):
                raise ChartError(f"Invalid coordinate name {name!r}")
        if len(set(coord_names)) != len(coord_names):
            raise ChartError(f"Coordinate names must be unique: {list(coord_names)}")
        if box is None:
            box = [DEFAULT_BOX] * len(coord_names)
        box = tuple((float(lo), float(hi)) for lo, hi in box)
        if len(box) != len(coord_names):
            raise ChartError(f"Box has {len(box)} intervals for {len(coord_names)} coordinates")
        for name, (lo, hi) in zip(coord_names, box):
            if not hi > lo:
                raise ChartError(f"Degenerate interval [{lo}, {hi}] for coordinate {name!r}")
        self.coord_names = coord_names
        self.box = box

    @property
    def dim(self):
        return len(self.coord_names)

    def index(self, name):
        try:
            return self.coord_names.index(name)
        except ValueError:
            raise ChartError(f"Unknown coordinate {name!r}; chart has {list(self.coord_names)}") from None

    def point(self, coords):
        p = np.asarray(coords, dtype=float)
        if p.shape != (self.dim,):
            raise DimensionError(f"Point has shape {p.shape}, chart dimension is {self.dim}")
        return p

    def contains(self, p):
        return all(lo <= x <= hi for x, (lo, hi) in zip(p, self.box))

    def extended(self, name, interval=DEFAULT_BOX):
        return Chart(self.coord_names + (name,), self.box + (tuple(interval),))

    def to_dict(self):
        return {'dim': self.dim, 'coords': list(self.coord_names),
                'box': [list(interval) for interval in self.box]}

    def __eq__(self, other):
        return (isinstance(other, Chart) and self.coord_names == other.coord_names
                and self.box == other.box)

    def __hash__(self):
        return hash((self.coord_names, self.box))

    def __repr__(self):
        return f"Chart({list(self.coord_names)!r}, box={list(self.box)!r})"


def sample_points(chart, count=DEFAULT_SAMPLE_COUNT, seed=DEFAULT_SEED):
    """
    Draw `count` distinct points uniformly from the chart box.

    The same (chart, count, seed) always yields the same list.
    """
    if count < 1:
        raise ValueError(f"Sample count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    lows = np.array([lo for lo, _ in chart.box])
    highs = np.array([hi for _, hi in chart.box])
    points = []
    seen = set()
    while len(points) < count:
        candidate = rng.uniform(lows, highs)
        key = tuple(candidate.tolist())
        if key in seen:
            continue
        seen.add(key)
        points.append(candidate)
    _logger.debug(f"Sampled {count} points on {chart} with seed {seed}")
    return points

import numpy as np
import pytest

from fcontact.chart import Chart, sample_points
from fcontact.exceptions import ChartError, DimensionError


def test_sample_points_inside_box_and_distinct():
    chart = Chart(['x'])
    points = sample_points(chart, 3, 7)
    assert len(points) == 3
    assert all(chart.contains(p) for p in points)
    assert len({tuple(p) for p in points}) == 3


def test_sample_points_deterministic():
    chart = Chart(['x', 'y', 'z'], [(-1, 1), (0, 2), (5, 6)])
    first = sample_points(chart, 20, 11)
    second = sample_points(chart, 20, 11)
    assert all(np.array_equal(a, b) for a, b in zip(first, second))
    assert all(5 <= p[2] <= 6 for p in first)


def test_different_seeds_differ():
    chart = Chart(['x', 'y'])
    assert not np.array_equal(sample_points(chart, 1, 1)[0], sample_points(chart, 1, 2)[0])


def test_sample_count_must_be_positive():
    with pytest.raises(ValueError):
        sample_points(Chart(['x']), 0, 1)


@pytest.mark.parametrize('names, box', [
    ([], None),
    (['x', 'x'], None),
    (['1x'], None),
    (['x'], [(0.0, 0.0)]),
    (['x', 'y'], [(-1, 1)]),
])
def test_invalid_charts(names, box):
    with pytest.raises(ChartError):
        Chart(names, box)


def test_point_dimension():
    chart = Chart(['x', 'y'])
    with pytest.raises(DimensionError):
        chart.point([1.0, 2.0, 3.0])


def test_extended_and_index():
    chart = Chart(['x', 'y']).extended('t')
    assert chart.coord_names == ('x', 'y', 't')
    assert chart.index('t') == 2
    assert chart.box[-1] == (-1.0, 1.0)
    with pytest.raises(ChartError):
        chart.index('w')
    assert chart == Chart(['x', 'y', 't'])
    assert chart.to_dict()['dim'] == 3

import json
import math

import pytest

from fcontact.exceptions import CatalogError, ConfigError, ParseError
from fcontact.pipeline import Pipeline, run_pipeline, to_json_line

ROUND_TRIP = {
    'input': {'catalog': 's-model', 'params': {'n': 1, 's': 2}},
    'steps': [
        {'op': 'lift'},
        {'op': 'verify', 'level': 'S'},
        {'op': 'check-deck', 'phi': {'map': ['x1', 'y1', 'z1 + 1', 'z2 + 1'],
                                     'inverse': ['x1', 'y1', 'z1 - 1', 'z2 - 1']}, 't0': 1.0},
        {'op': 'slice'},
        {'op': 'compare', 'to': 'input'},
    ],
}


def _pipeline(*steps, source=None):
    return {'input': source or {'catalog': 's-model'}, 'steps': list(steps)}


def test_verify_pipeline():
    records, passed = run_pipeline(_pipeline({'op': 'verify'}), samples=5, seed=1)
    assert passed
    assert len(records) == 1
    assert records[0]['achieved'] == 'S' and records[0]['samples'] == 5


def test_lift_and_slice_round_trip():
    records, passed = run_pipeline(ROUND_TRIP, samples=5, seed=1)
    assert passed, records
    assert [r['op'] for r in records] == ['lift', 'verify', 'check-deck', 'slice', 'compare']
    assert records[0]['coords'] == ['x1', 'y1', 'z1', 'z2', 't']
    assert records[3]['coords'] == ['x1', 'y1', 'z1', 'z2']
    assert records[4]['max_difference'] <= 1e-10


def test_runs_are_deterministic():
    first, _ = run_pipeline(ROUND_TRIP, samples=4, seed=9)
    second, _ = run_pipeline(ROUND_TRIP, samples=4, seed=9)
    assert [to_json_line(r) for r in first] == [to_json_line(r) for r in second]


def test_sampling_section_and_tolerance():
    config = {**_pipeline({'op': 'verify'}), 'sampling': {'count': 3, 'seed': 5}, 'tolerance': 1e-8}
    pipeline = Pipeline(config)
    assert (pipeline.samples, pipeline.seed, pipeline.tol) == (3, 5, 1e-8)
    assert Pipeline(config, samples=6).samples == 6


def test_deformations_in_sequence():
    steps = [
        {'op': 'rotate', 'A': [[0.6, -0.8], [0.8, 0.6]]},
        {'op': 'type2', 'theta': [['a', '-0.25', '0', '0'], ['-0.3', '0.2', '0', '0']], 'params': {'a': 0.5}},
        {'op': 'antirotate', 'A': [[0.6, -0.8], [0.8, 0.6]]},
        {'op': 'verify', 'level': 'S'},
    ]
    records, passed = run_pipeline(_pipeline(*steps), samples=4, seed=2)
    assert passed, records
    assert records[-1]['achieved'] == 'S'


def test_compare_with_earlier_step():
    steps = [{'op': 'lift'}, {'op': 'slice'}, {'op': 'lift'}, {'op': 'compare', 'to': 0}]
    records, passed = run_pipeline(_pipeline(*steps), samples=4)
    assert passed
    assert records[-1]['to'] == 0


def test_failed_precondition_stops_the_run():
    steps = [{'op': 'type2', 'theta': [['0', 'x1', '0', '0'], ['0', '0', '0', '0']]}, {'op': 'verify'}]
    records, passed = run_pipeline(_pipeline(*steps), samples=4)
    assert not passed
    assert len(records) == 1
    assert records[0]['passed'] is False and 'closed' in records[0]['error']


def test_failed_check_continues():
    steps = [
        {'op': 'check-automorphism', 'phi': {'map': ['2*x1', 'y1', 'z1', 'z2'], 'label': 'dilation'}},
        {'op': 'verify', 'level': 'metric-f'},
    ]
    records, passed = run_pipeline(_pipeline(*steps), samples=4)
    assert not passed
    assert records[0]['map'] == 'dilation' and not records[0]['passed']
    assert records[1]['passed']


def test_unreachable_rotation_target():
    records, passed = run_pipeline(_pipeline({'op': 'search-rotation', 'target': [-0.9, 0.9]}))
    assert not passed
    assert records[0]['best_residual'] >= 0.099


def test_reachable_rotation_target():
    records, passed = run_pipeline(_pipeline({'op': 'search-rotation', 'target': [-0.6, -0.5, 1.1]}))
    assert passed
    assert records[0]['target'] == [-0.6, -0.5, 1.1]
    assert records[0]['residual'] <= 1e-10


@pytest.mark.parametrize('steps', [
    [{'op': 'rotate', 'A': [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]}],
    [{'op': 'rotate', 'A': [[0.7071067811865476, -0.7071067811865476], [0.7071067811865476, 0.7071067811865476]]}],
    [{'op': 'type2', 'theta': [['0', '0', '0', '0']]}],
    [{'op': 'verify', 'level': 'sasakian'}],
    [{'op': 'slice'}, {'op': 'slice'}],
    [{'op': 'compare', 'to': 0}],
    [{'op': 'lift'}, {'op': 'compare', 'to': 'input'}],
    [{'op': 'search-rotation', 'target': [1.0, 1.0]}],
    [{'op': 'check-deck', 'phi': {'map': ['x1', 'y1', 'z1', 'z2']}, 't0': 1.0}],
    [{'op': 'lift'}, {'op': 'check-deck', 'phi': {'map': ['x1', 'y1', 'z1', 'z2']}, 't0': 0.0}],
    [{'op': 'check-automorphism', 'phi': {'map': ['x1', 'y1']}}],
])
def test_invalid_pipelines_fail_before_running(steps):
    with pytest.raises(ConfigError):
        Pipeline(_pipeline(*steps))


def test_bad_expression_fails_before_running():
    with pytest.raises(ParseError):
        Pipeline(_pipeline({'op': 'lift'}, {'op': 'type2', 'theta': [['z1 +', '0', '0', '0', '0']] * 3}))


def test_expressions_see_the_lifted_chart():
    Pipeline(_pipeline({'op': 'lift'}, {'op': 'type2', 'theta': [['t', '0', '0', '0', '0']] * 3}))
    with pytest.raises(ParseError):
        Pipeline(_pipeline({'op': 'type2', 'theta': [['t', '0', '0', '0']] * 2}))


def test_unknown_catalog_entry():
    with pytest.raises(CatalogError):
        Pipeline(_pipeline({'op': 'verify'}, source={'catalog': 'nothing'}))


def test_json_lines():
    line = to_json_line({'b': math.inf, 'a': [1.0, (2, 3)]})
    assert line == '{"a": [1.0, [2, 3]], "b": null}'
    assert json.loads(line)['b'] is None

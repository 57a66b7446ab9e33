import json

import pytest
from click.testing import CliRunner

from fcontact import catalog
from fcontact.cli import cli


def _records(result):
    return [json.loads(line) for line in result.output.splitlines() if line.startswith('{')]


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, ['--samples', '4', '--seed', '1'] + list(args))
    return invoke


@pytest.fixture
def structure_file(tmp_path):
    def write(document):
        path = tmp_path / 'structure.json'
        path.write_text(json.dumps(document))
        return str(path)
    return write


def test_catalog_list(run):
    result = run('catalog', 'list')
    assert result.exit_code == 0
    assert [r['name'] for r in _records(result)] == ['sasakian-model', 's-model', 'lifted-k']


def test_catalog_show(run):
    result = run('catalog', 'show', 's-model', '--param', 's=3')
    assert result.exit_code == 0
    record, = _records(result)
    assert record['params'] == {'n': 1, 's': 3}
    assert record['structure']['s'] == 3


@pytest.mark.parametrize('args', [
    ['catalog', 'show', 'nothing'],
    ['catalog', 'show', 's-model', '--param', 's=9'],
    ['catalog', 'show', 's-model', '--param', 's'],
    ['catalog', 'show', 's-model', '--param', 's=two'],
])
def test_catalog_errors(run, args):
    assert run(*args).exit_code == 2


def test_verify_catalog_structure(run):
    result = run('verify', 'catalog:s-model', '--param', 'n=2')
    assert result.exit_code == 0
    record, = _records(result)
    assert record['op'] == 'verify'
    assert record['achieved'] == 'S' and record['samples'] == 4
    assert record['dim'] == 6


def test_verify_file(run, structure_file):
    path = structure_file(catalog.model_config(1, ['z'], 'from-file'))
    result = run('verify', path, '--level', 'f-contact')
    assert result.exit_code == 0
    record, = _records(result)
    assert record['structure'] == 'from-file'
    assert record['requested'] == 'f-contact'


def test_verify_failure_exits_one(run, structure_file):
    document = catalog.model_config(1, ['z'], 'broken')
    document['xi'][0][2] = '4'
    result = run('verify', structure_file(document))
    assert result.exit_code == 1
    record, = _records(result)
    assert record['achieved'] == 'none' and record['passed'] is False


def test_verify_input_errors(run, structure_file, tmp_path):
    document = catalog.model_config(1, ['z'], 'bad')
    document['g'][0][0] = '0.25 +'
    assert run('verify', structure_file(document)).exit_code == 2
    assert run('verify', str(tmp_path / 'missing.json')).exit_code == 2
    assert run('verify', structure_file({'chart': {}})).exit_code == 2
    assert run('verify', structure_file(catalog.model_config(1, ['z'], 'ok')), '--param', 'n=1').exit_code == 2


def test_global_options_are_validated():
    assert CliRunner().invoke(cli, ['--samples', '0', 'catalog', 'list']).exit_code == 2


def test_environment_sets_sample_count(monkeypatch):
    monkeypatch.setenv('FCONTACT_SAMPLES', '3')
    result = CliRunner().invoke(cli, ['verify', 'catalog:sasakian-model'])
    assert result.exit_code == 0
    assert _records(result)[0]['samples'] == 3
    monkeypatch.setenv('FCONTACT_SAMPLES', 'many')
    assert CliRunner().invoke(cli, ['verify', 'catalog:sasakian-model']).exit_code == 2


def test_deform_rotate(run):
    result = run('deform', 'catalog:s-model', '--kind', 'rotate', '--matrix', '[[0.6, -0.8], [0.8, 0.6]]')
    assert result.exit_code == 0
    record, = _records(result)
    assert record['op'] == 'rotate' and record['achieved'] == 'S'


def test_deform_antirotate(run):
    result = run('deform', 'catalog:s-model', '--kind', 'antirotate', '--matrix', '[[0.6, 0.8], [0.8, -0.6]]')
    assert result.exit_code == 0


def test_deform_type2(run):
    assert run('deform', 'catalog:s-model', '--kind', 'type2', '--theta', 'default').exit_code == 0
    theta = json.dumps([['0.5', '0', '0', '0'], ['0', '-0.2', '0', '0']])
    assert run('deform', 'catalog:s-model', '--kind', 'type2', '--theta', theta).exit_code == 0


def test_deform_errors(run):
    assert run('deform', 'catalog:s-model', '--kind', 'rotate').exit_code == 2
    assert run('deform', 'catalog:s-model', '--kind', 'rotate', '--matrix', '[[1, 0]').exit_code == 2
    assert run('deform', 'catalog:s-model', '--kind', 'rotate', '--matrix', '[[1, 1], [0, 1]]').exit_code == 1
    assert run('deform', 'catalog:s-model', '--kind', 'type2').exit_code == 2
    assert run('deform', 'catalog:s-model', '--kind', 'type2', '--theta', '[["0", "0"]]').exit_code == 2
    not_closed = json.dumps([['0', 'x1', '0', '0'], ['0', '0', '0', '0']])
    assert run('deform', 'catalog:s-model', '--kind', 'type2', '--theta', not_closed).exit_code == 1


def test_lift(run):
    result = run('lift', 'catalog:sasakian-model')
    assert result.exit_code == 0
    record, = _records(result)
    assert record['coords'] == ['x1', 'y1', 'z', 't']
    assert record['s'] == 2 and record['achieved'] == 'S'


def test_slice(run):
    result = run('slice', 'catalog:lifted-k', '--param', 'k=2')
    assert result.exit_code == 0
    record, = _records(result)
    assert record['coords'] == ['x1', 'y1', 'z', 't']
    assert run('slice', 'catalog:sasakian-model').exit_code == 1


def test_check_deck(run):
    result = run('check-deck', 'catalog:sasakian-model', '--automorphism', 'z-translation', '--t0', '1')
    assert result.exit_code == 0
    record, = _records(result)
    assert record['op'] == 'check-deck' and record['passed'] is True and record['t0'] == 1.0


def test_check_deck_with_explicit_map(run):
    result = run('check-deck', 'catalog:lifted-k', '--lifted', '--map', '["x1", "y1", "z + 1"]',
                 '--inverse', '["x1", "y1", "z - 1"]', '--t0', '0.5')
    assert result.exit_code == 0
    assert 'inverse_metric' in _records(result)[0]['residuals']


def test_check_deck_failures(run):
    result = run('check-deck', 'catalog:sasakian-model', '--automorphism', 'x1-dilation', '--t0', '1')
    assert result.exit_code == 1
    assert _records(result)[0]['passed'] is False
    assert run('check-deck', 'catalog:sasakian-model', '--t0', '1').exit_code == 2
    assert run('check-deck', 'catalog:sasakian-model', '--automorphism', 'shear', '--t0', '1').exit_code == 2
    assert run('check-deck', 'catalog:lifted-k', '--lifted', '--automorphism', 'z-translation',
               '--t0', '1').exit_code == 2
    assert run('check-deck', 'catalog:sasakian-model', '--automorphism', 'z-translation',
               '--t0', '0').exit_code == 1


def test_search_rotation(run):
    result = run('search-rotation', '--s', '3', '--target=-0.6,-0.5,1.1')
    assert result.exit_code == 0
    record, = _records(result)
    assert record['passed'] is True and record['residual'] <= 1e-10
    assert len(record['A']) == 3


def test_search_rotation_unreachable(run):
    result = run('search-rotation', '--s', '2', '--target=-0.9,0.9')
    assert result.exit_code == 1
    record, = _records(result)
    assert record['passed'] is False and record['best_residual'] >= 0.099


def test_search_rotation_errors(run):
    assert run('search-rotation', '--s', '3', '--target', 'a,b').exit_code == 2
    assert run('search-rotation', '--s', '1', '--target', '0').exit_code == 2
    assert run('search-rotation', '--s', '3', '--target=-1,1').exit_code == 1


def test_run_pipeline(run, tmp_path):
    path = tmp_path / 'pipeline.json'
    path.write_text(json.dumps({
        'input': {'catalog': 'sasakian-model'},
        'steps': [{'op': 'lift'}, {'op': 'verify'}, {'op': 'slice'}, {'op': 'compare'}],
    }))
    result = run('run', str(path))
    assert result.exit_code == 0
    assert [r['op'] for r in _records(result)] == ['lift', 'verify', 'slice', 'compare']


def test_run_failing_pipeline(run, tmp_path):
    path = tmp_path / 'pipeline.json'
    path.write_text(json.dumps({
        'input': {'catalog': 'sasakian-model'},
        'steps': [{'op': 'check-automorphism', 'phi': {'map': ['2*x1', 'y1', 'z']}}],
    }))
    assert run('run', str(path)).exit_code == 1
    path.write_text(json.dumps({'input': {'catalog': 'sasakian-model'}, 'steps': [{'op': 'slice'}]}))
    assert run('run', str(path)).exit_code == 2

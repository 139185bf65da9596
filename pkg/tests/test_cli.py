import json
from fractions import Fraction

import pytest

from momentkit.cli import HANDLERS, JobSpec, ingest, main, render_document, run
from momentkit.config import Config
from momentkit.errors import SchemaError
from momentkit.moments import Kind


@pytest.fixture
def config(tmp_path):
    return Config(str(tmp_path / "missing.yaml"))


def write_moments(tmp_path, doc, name="moments.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
    return str(path)


def test_analyze_generator(config):
    code, doc = run(JobSpec('analyze', generator='laguerre', terms=12), config)
    assert code == 0
    assert doc['result']['hankel']['verdict'] == 'stieltjes_ok'
    assert 'coefficients' in doc['result']
    assert doc['mode'] == 'exact'
    assert doc['input']['K'] == 12
    assert doc['tool']['name'] == 'momentkit'


def test_pade_job_brackets(config):
    job = JobSpec('pade', generator='laguerre', terms=20,
                  params={'x': '1', 'nmax': 10, 'shapes': '-1,0,1'})
    code, doc = run(job, config)
    assert code == 0
    table = doc['result']['pade']
    assert all(table['shapes'][ell]['monotone'] for ell in ('-1', '0', '1'))
    lower, upper = (Fraction(v) for v in table['bracket'])
    assert lower <= 0.596347362323194 <= upper


def test_ingest_exact(tmp_path):
    path = write_moments(tmp_path, {'kind': 'stieltjes', 'moments': ['2', '2', '4'], 'label': 'x'})
    seq = ingest(path)
    assert seq.gamma == (1, 1, 2)
    assert seq.kind is Kind.STIELTJES
    assert seq.label == 'x'


def test_ingest_decimal_is_float_mode(tmp_path):
    seq = ingest(write_moments(tmp_path, {'moments': ['1', '0.5', '0.75']}))
    assert not seq.exact
    assert seq.kind is Kind.UNKNOWN


@pytest.mark.parametrize("doc", [
    '{"moments": ["1", "2"',
    {'moments': [1, 2, 3]},
    {'moments': ['1', 'two']},
    {'moments': ['1', '0', '1'], 'kind': 'other'},
    {'moments': '1, 0, 1'},
    ['1', '0', '1'],
])
def test_ingest_rejects_bad_documents(tmp_path, doc):
    with pytest.raises(SchemaError):
        ingest(write_moments(tmp_path, doc))


def test_ingest_reports_json_position(tmp_path):
    path = write_moments(tmp_path, '{\n  "moments": [\n    "1",\n  ]\n}')
    with pytest.raises(SchemaError) as exc:
        ingest(path)
    assert exc.value.details['line'] == 4


@pytest.mark.parametrize("job,error", [
    (JobSpec('analyze', file='/nonexistent/moments.json'), 'SchemaError'),
    (JobSpec('analyze', generator='hermite', terms=12, precision_bits=32), 'InvalidPrecision'),
    (JobSpec('analyze', generator='hermite', terms=12, output_format='csv'), 'SchemaError'),
    (JobSpec('analyze', generator='hermite'), 'SchemaError'),
    (JobSpec('pade', generator='laguerre', terms=12, params={'x': '1'}), 'SchemaError'),
    (JobSpec('pade', generator='laguerre', terms=12, params={'x': '1', 'nmax': 2, 'shapes': 'a'}),
     'SchemaError'),
    (JobSpec('transform', generator='laguerre', terms=12, params={'op': 'shift'}), 'SchemaError'),
    (JobSpec('jacobi', generator='hermite', terms=12, params={'variant': 'K'}), 'KreinCornerUndefined'),
])
def test_failures_exit_two(config, job, error):
    code, doc = run(job, config)
    assert code == 2
    assert doc['error']['error'] == error
    assert 'result' not in doc


def test_transform_even_embed(config):
    job = JobSpec('transform', generator='laguerre', terms=2, params={'op': 'even-embed'})
    code, doc = run(job, config)
    assert code == 0
    assert doc['result']['moments']['moments'] == ['1', '0', '1', '0', '2']
    assert len(doc['result']['digest']) == 64


def test_quadrature_nodes(config):
    job = JobSpec('quadrature', generator='hermite', terms=4, params={'depth': 2})
    code, doc = run(job, config)
    assert code == 0
    nodes = [float(v) for v in doc['result']['quadrature']['nodes']]
    assert nodes == pytest.approx([-1.0, 1.0])
    assert doc['result']['_rows'][0] == ['node', 'weight']


def test_nevanlinna_values(config):
    job = JobSpec('nevanlinna', generator='hermite', terms=12,
                  params={'z': 'i', 'depth': 1, 't': '0,inf'})
    code, doc = run(job, config)
    assert code == 0
    result = doc['result']
    assert result['vonneumann_G'] == {'0': '0+1/2i', 'inf': '0+1i'}
    assert result['weyl_disk']['center'] == '0+3/4i'


def test_nevanlinna_float_weyl_disk(config):
    job = JobSpec('nevanlinna', generator='lognormal', terms=20, precision_bits=256,
                  params={'z': '0+1i', 'depth': 5})
    code, doc = run(job, config)
    assert code == 0
    assert doc['mode'] == 'float(256)'
    disk = doc['result']['weyl_disk']
    assert disk['N'] == 6
    assert 0 < float(disk['radius']) < 1


@pytest.mark.parametrize('exc', [
    ZeroDivisionError('division by zero'),
    TypeError("unsupported operand type(s) for /: 'Fraction' and 'mpf'"),
])
def test_unclassified_errors_exit_three(config, monkeypatch, exc):
    def handler(seq, job, config):
        raise exc

    monkeypatch.setitem(HANDLERS, 'analyze', handler)
    code, doc = run(JobSpec('analyze', generator='hermite', terms=12), config)
    assert code == 3
    assert doc['error']['error'] == 'NumericalError'
    assert doc['error']['message'] == str(exc)
    assert doc['error']['details'] == {'cause': type(exc).__name__}
    assert 'result' not in doc


def test_classify_job(config):
    code, doc = run(JobSpec('classify', generator='hermite', terms=40), config)
    assert code == 0
    assert doc['result']['determinacy']['verdict'] == 'hamburger_determinate'


def test_render_document_is_deterministic(config):
    job = JobSpec('pade', generator='laguerre', terms=12, params={'x': '1/2', 'nmax': 3})
    _, doc = run(job, config)
    text = render_document(doc)
    assert text == render_document(run(job, config)[1])
    assert '_rows' not in json.loads(text)['result']
    assert render_document(doc, 'csv').splitlines()[0] == 'ell,N,M,value,exists'


def test_main_writes_json_report(tmp_path):
    out = tmp_path / "report.json"
    code = main(['analyze', '--generator', 'hermite', '--terms', '12',
                 '--out', str(out), '--config', str(tmp_path / "missing.yaml")])
    assert code == 0
    report = json.loads(out.read_text(encoding='utf-8'))
    assert report['result']['hankel']['verdict'] == 'hamburger_ok'


def test_main_csv_with_negative_shapes(tmp_path):
    out = tmp_path / "pade.csv"
    code = main(['pade', '--generator', 'laguerre', '--terms', '12', '--x', '1',
                 '--nmax', '3', '--shapes', '-1,0,1', '--format', 'csv',
                 '--out', str(out), '--config', str(tmp_path / "missing.yaml")])
    assert code == 0
    lines = out.read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'ell,N,M,value,exists'
    assert lines[1].startswith('-1,')


def test_main_failure_exit_code(tmp_path, capsys):
    code = main(['analyze', '--file', str(tmp_path / "absent.json"),
                 '--config', str(tmp_path / "missing.yaml")])
    assert code == 2
    assert json.loads(capsys.readouterr().out)['error']['error'] == 'SchemaError'

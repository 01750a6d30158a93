import csv
import json
import subprocess
import sys

import pytest

from dstab import cli

from conftest import COMPANION4


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return {
        'companion': write('companion.csv', '\n'.join(
            ','.join(str(x) for x in row) for row in COMPANION4) + '\n'),
        'notds': write('notds.csv', '1,-2\n2,-2.5\n'),
        'minus_id': write('minus_id.csv', '-1,0\n0,-1\n'),
        'rotation': write('rotation.csv', '0,1\n-1,0\n'),
        'singular': write('singular.csv', '1,2\n2,4\n'),
        'ragged': write('ragged.csv', '1,2\n3\n'),
        'wide': write('wide.csv', '1,2,3\n4,5,6\n'),
        'oscillator': write('osc.json', json.dumps(
            {'mass': [[1]], 'damping': [[2]], 'stiffness': [[4]]})),
        'eq6': write('eq6.json', json.dumps(
            {'convention': 'eq6', 'B': [[-1, -1], [-4, -5]], 'C': [[-1, '-4/5'], [-4, -4]]})),
        'frac': write('frac.json', json.dumps({'matrix': [[-1, 0], [0, -1]], 'gamma': '4/3'})),
        'sector': write('sector.json', json.dumps({'type': 'sector', 'two_cos': '1'})),
        'tmp': tmp_path,
    }


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


class TestCommands:
    def test_eig(self, capsys, files):
        code, rep = run(capsys, 'eig', '--matrix', files['companion'])
        assert code == 0
        assert rep['schema'] == 'dstab-report/1' and rep['command'] == 'eig'
        assert len(rep['inputDigest']) == 64
        assert rep['result']['abscissa'] < 0

    def test_classes_and_compound(self, capsys, files):
        code, rep = run(capsys, 'classes', '--matrix', files['minus_id'])
        assert code == 0 and rep['result'] is not None
        code, rep = run(capsys, 'compound', '--matrix', files['companion'])
        assert code == 0
        assert rep['result']['index'][0] == [1, 2] and len(rep['result']['rows']) == 6
        assert [s['label'] for s in rep['spectra']] == ['A', 'A^[2]']

    def test_region_check(self, capsys, files):
        assert run(capsys, 'region-check', '--matrix', files['minus_id'])[0] == 0
        code, rep = run(capsys, 'region-check', '--matrix', files['rotation'])
        assert code == 1 and not rep['result']['allInside']
        code, _ = run(capsys, 'region-check', '--matrix', files['minus_id'],
                      '--region', 'shifted', '--alpha', '-2')
        assert code == 1

    def test_boundary(self, capsys, files):
        code, rep = run(capsys, 'boundary', '--matrix', files['minus_id'], '--d', '1,2',
                        '--theta', '1.0')
        assert code == 0 and rep['parameters']['d'] == [1.0, 2.0]
        code, _ = run(capsys, 'boundary', '--matrix', files['minus_id'], '--d', '1,x')
        assert code == 64

    def test_check_falsified(self, capsys, files):
        code, rep = run(capsys, 'check', '--matrix', files['notds'])
        assert code == 1
        d1, d2 = rep['verdict']['witness']['d']
        assert d1 / d2 == pytest.approx(2.5, abs=1e-6)

    def test_check_companion_inconclusive(self, capsys, files):
        code, rep = run(capsys, 'check', '--matrix', files['companion'], '--exact', '--budget', '100')
        assert code == 2 and rep['verdict']['status'] == 'Inconclusive'

    def test_check_certificate_file(self, capsys, files):
        out = files['tmp'] / 'r.json'
        code, _ = run(capsys, 'check', '--matrix', files['minus_id'], '--region', files['sector'],
                      '--exact', '--out', str(out))
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep['verdict']['status'] == 'Certified'
        cert = json.loads((files['tmp'] / 'r.json.cert.json').read_text())
        assert cert['status'] == 'NonvanishingOnOrthant'
        assert rep['certificatePath'].endswith('r.json.cert.json')

    def test_certificate_embedded_without_out(self, capsys, files):
        code, rep = run(capsys, 'certify', '--matrix', files['minus_id'])
        assert code == 0 and rep['certificate']['status'] == 'NonvanishingOnOrthant'
        assert rep['result']['certificateId'] == rep['result']['certificateId'].lower()

    def test_certify_charpoly_sum(self, capsys, files):
        code, rep = run(capsys, 'certify', '--matrix', files['companion'], '--charpoly-sum',
                        '--cert-out', str(files['tmp'] / 'c.json'))
        assert code == 2 and rep['result']['terms'] == 49
        assert (files['tmp'] / 'c.json').is_file()

    def test_sweep(self, capsys, files):
        code, rep = run(capsys, 'sweep', '--matrix', files['minus_id'], '--budget', '50')
        assert code == 2 and rep['verdict']['samplesTested'] == 50

    def test_mech(self, capsys, files):
        code, rep = run(capsys, 'mech', '--system', files['oscillator'], '--zeta', '0.4')
        assert code == 1
        assert rep['verdict']['witness']['d'][0] == pytest.approx(0.64, abs=1e-6)
        assert run(capsys, 'mech', '--system', files['oscillator'])[0] == 64
        code, _ = run(capsys, 'mech', '--system', files['eq6'], '--exact', '--budget', '50')
        assert code == 2

    def test_frac(self, capsys, files):
        assert run(capsys, 'frac', '--system', files['frac'])[0] == 0
        assert run(capsys, 'frac', '--matrix', files['minus_id'], '--gamma', '4/3')[0] == 0
        assert run(capsys, 'frac', '--matrix', files['minus_id'])[0] == 64
        assert run(capsys, 'frac', '--matrix', files['minus_id'], '--gamma', '2')[0] == 64

    def test_plot_data(self, capsys, files):
        path = files['tmp'] / 'plot.csv'
        run(capsys, 'check', '--matrix', files['notds'], '--plot-data', str(path))
        rows = list(csv.reader(path.open()))
        assert rows[0] == ['label', 're', 'im']
        labels = {r[0] for r in rows[1:]}
        assert {'A', 'boundary', 'witness'} <= labels

    def test_deterministic(self, capsys, files):
        a = run(capsys, 'check', '--matrix', files['notds'], '--seed', '5')[1]
        b = run(capsys, 'check', '--matrix', files['notds'], '--seed', '5', '--workers', '3')[1]
        assert a['verdict'] == b['verdict']


class TestExitCodes:
    def test_usage(self, capsys, files):
        assert run(capsys, 'nonsense')[0] == 64
        assert run(capsys, 'check', '--matrix', files['minus_id'], '--region', 'sector')[0] == 64
        assert run(capsys, 'check', '--matrix', files['minus_id'], '--region', 'moon')[0] == 64

    def test_malformed(self, capsys, files):
        assert run(capsys, 'eig', '--matrix', files['ragged'])[0] == 65
        assert run(capsys, 'eig', '--matrix', files['wide'])[0] == 65

    def test_missing(self, capsys, files):
        assert run(capsys, 'eig', '--matrix', str(files['tmp'] / 'nope.csv'))[0] == 66

    def test_shape(self, capsys, files):
        assert run(capsys, 'classes', '--matrix', files['minus_id'], '--guard', '1')[0] == 67

    def test_unsupported(self, capsys, files):
        code, _ = run(capsys, 'check', '--matrix', files['minus_id'], '--region', 'sector',
                      '--theta', '0.7', '--exact')
        assert code == 68

    def test_singular(self, capsys, files):
        assert run(capsys, 'boundary', '--matrix', files['singular'], '--d', '1,1')[0] == 69

    def test_class_mismatch(self, capsys, files):
        code, _ = run(capsys, 'check', '--matrix', files['minus_id'], '--region', 'shifted',
                      '--alpha', '-0.5', '--class', 'Dplus')
        assert code == 64


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, '-m', 'dstab.cli', 'eig', '--matrix', files['minus_id']],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)['command'] == 'eig'

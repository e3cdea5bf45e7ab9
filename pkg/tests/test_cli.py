import json

import pandas as pd
import pytest

from cli import EXIT_OK, EXIT_USAGE, main

TWO_CYCLE = """
[type]
p = 3
f = 1
n = 2
a_prime = [1, 3]
s_tau = [2, 1]
"""

PRINCIPAL = """
[type]
p = 5
f = 1
n = 3
a_prime = [3, 2, 1]
s_tau = [1, 2, 3]

[hecke]
element = "q^-1*x1*x2"
"""

POINT = """
[weight]
p = 11
f = 1
n = 3
lambda = [[4, 2, 0]]

[point]
t = ["t1", "pi", "t3"]
"""


@pytest.fixture
def config(tmp_path):
    def write(text, name="job.toml"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_type_inspect(config, capsys):
    assert main(['type', 'inspect', '--config', config(TWO_CYCLE)]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data['type']['s_tau'] == [2, 1]
    assert data['type']['orbits'] == [[1, 2]]
    assert data['presentation'] == {'s': [[2, 1]], 'mu': [[0, 0]]}


def test_hecke_present_writes_tsv(config, tmp_path):
    out = tmp_path / "present.tsv"
    assert main(['hecke', 'present', '--config', config(PRINCIPAL), '--out', str(out)]) == EXIT_OK
    frame = pd.read_csv(out, sep='\t')
    assert len(frame) == 8
    assert frame['integral'].all()


def test_hecke_reduce(config, capsys):
    assert main(['hecke', 'reduce', '--config', config(PRINCIPAL)]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data['image'] == "1 * y2^1"


def test_hecke_mul_needs_other(config):
    assert main(['hecke', 'mul', '--config', config(PRINCIPAL)]) == EXIT_USAGE


def test_galois_eval(config, capsys):
    assert main(['galois', 'eval', '--config', config(POINT)]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data['stratum'] == [1]
    assert data['supersingular'] is False
    assert data['fbar'][0] == "1 * t1^1"


def test_usage_errors(config, tmp_path):
    assert main(['type', 'inspect']) == EXIT_USAGE
    assert main(['type', 'inspect', '--config', str(tmp_path / "missing.toml")]) == EXIT_USAGE
    assert main(['type', 'bogus', '--config', config(TWO_CYCLE)]) == EXIT_USAGE
    assert main(['verify', 'bogus']) == EXIT_USAGE
    bad = config(TWO_CYCLE.replace("a_prime = [1, 3]", "a_prime = [1, 2]"), "bad.toml")
    assert main(['type', 'inspect', '--config', bad]) == EXIT_USAGE


def test_verify_writes_summary(tmp_path):
    out = tmp_path / "results"
    code = main(['verify', 'fail-example', '--trials', '2', '--out', str(out)])
    assert code == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary['fail-example']['passed'] is True
    assert (out / "fail-example.tsv").exists()

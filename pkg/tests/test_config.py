import pytest

from config import _int_env, load_job_config
from errors import ConfigError, SatakeForgeError


def _write(tmp_path, text):
    path = tmp_path / "job.toml"
    path.write_text(text)
    return path


def test_load_valid_config(tmp_path):
    path = _write(tmp_path, """
[type]
p = 3
f = 1
n = 2
a_prime = [1, 3]
s_tau = [2, 1]
""")
    data = load_job_config(path)
    assert data['type']['a_prime'] == [1, 3]
    assert data['type']['s_tau'] == [2, 1]


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        load_job_config(tmp_path / "nope.toml")


def test_empty_config(tmp_path):
    with pytest.raises(ConfigError, match="empty"):
        load_job_config(_write(tmp_path, ""))


def test_parse_error_reports_position(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_job_config(_write(tmp_path, "[type]\np = = 3\n"))
    assert "line" in str(info.value)


def test_missing_fields_are_named(tmp_path):
    path = _write(tmp_path, "[weight]\np = 5\nf = 1\n")
    with pytest.raises(ConfigError) as info:
        load_job_config(path)
    assert "n" in str(info.value) and "lambda" in str(info.value)


def test_section_must_be_table(tmp_path):
    with pytest.raises(ConfigError, match="must be a table"):
        load_job_config(_write(tmp_path, "hecke = 3\n"))


def test_int_env(monkeypatch):
    monkeypatch.setenv("SATAKE_FORGE_TEST_INT", "17")
    assert _int_env("SATAKE_FORGE_TEST_INT", 0) == 17
    monkeypatch.setenv("SATAKE_FORGE_TEST_INT", " ")
    assert _int_env("SATAKE_FORGE_TEST_INT", 4) == 4
    monkeypatch.setenv("SATAKE_FORGE_TEST_INT", "many")
    with pytest.raises(ConfigError):
        _int_env("SATAKE_FORGE_TEST_INT", 0)


def test_config_error_is_library_error():
    assert issubclass(ConfigError, SatakeForgeError)
    assert issubclass(ConfigError, ValueError)

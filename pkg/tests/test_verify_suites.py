import pytest

from errors import ConfigError
from verify_suites import SUITES, SuiteRunner, deep_prime, levi_depth, spectral_depth, sub_seed


def _runner(**kwargs):
    return SuiteRunner(seed=kwargs.pop('seed', 0), progress=False, **kwargs)


def test_suite_names():
    assert len(SUITES) == 12
    assert SUITES['reduction-map'] == 'reduction'
    for method in SUITES.values():
        assert callable(getattr(SuiteRunner, method))


def test_seeds_and_primes():
    assert sub_seed(0, 5) == 5
    assert sub_seed(2, 1) == 2_000_007
    assert deep_prime(2) == 19
    assert deep_prime(3) == 29
    assert deep_prime(4) == 37
    assert deep_prime(4, m=levi_depth(4)) == 53
    assert spectral_depth(3) == 6
    assert levi_depth(3) == 8


@pytest.mark.parametrize("name,kwargs", [
    ('conv-formulas', {'trials': 5}),
    ('cauchy-binet', {'trials': 2, 'n': 3}),
    ('fail-example', {'trials': 3}),
    ('wd-dictionary', {'trials': 2, 'n': 2}),
    ('spectral-diagram', {'trials': 1, 'n': 2}),
])
def test_cheap_suites_pass(name, kwargs):
    runner = _runner(**kwargs)
    result = runner.run(name)
    assert result.passed, result.failures[:3]
    assert result.checked > 0
    assert runner.stats['suites_passed'] == 1


def test_results_depend_only_on_seed():
    first = _runner(seed=7, trials=3).run('fail-example')
    second = _runner(seed=7, trials=3).run('fail-example')
    assert first.rows == second.rows


def test_unknown_suite():
    with pytest.raises(ConfigError):
        _runner().run('nonsense')


def test_conv_oracle_limits():
    with pytest.raises(ConfigError):
        _runner(p=5).run('conv-oracle')


def test_result_dict():
    result = _runner(trials=1, n=2).run('cauchy-binet')
    d = result.to_dict()
    assert d['name'] == 'cauchy-binet'
    assert d['passed'] is True
    assert d['failures'] == []


def test_fixed_prime_must_clear_the_depth():
    with pytest.raises(ConfigError):
        _runner(p=11, n=3, trials=1).run('spectral-diagram')
    with pytest.raises(ConfigError):
        _runner(p=11, n=3, trials=1).run('reduction-map')

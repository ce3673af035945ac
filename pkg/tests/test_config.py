import pytest

from evoindex.config import ConfigError, load_config, parse_config
from evoindex.harness import Mode
from evoindex.selection import OrderingStrategy

ABSTRACT = """
# comment lines and blanks are fine

mode = abstract
horizon = 90
sample_interval = 5
seeds = 1, 2, 3
s0 = 60000
alpha = 1/15
"""

MECHANISTIC = """
mode = mechanistic
horizon = 12
sample_interval = 1
seeds = 1,2,3,4,5
lambda = 8000
m = 160
beta = 0.8
ordering = non_random
weight = 1.0
penalty_scale = 1.0
gamma = 0.9
case_mix = 0.05, 0.95, 0.0
terms_per_query = 1, 1
truth.terms = 500
truth.objects = 1500
truth.degree = 40
init_links_per_term = 160
deconstruct.day = 2
deconstruct.objects = 5
"""


def test_parse_abstract_config():
    config = parse_config(ABSTRACT)
    assert config.mode == Mode.ABSTRACT
    assert config.horizon == 90.0
    assert config.sample_interval == 5.0
    assert config.seeds == (1, 2, 3)
    assert config.s0 == 60000
    assert config.alpha == pytest.approx(1 / 15)


def test_parse_mechanistic_config():
    config = parse_config(MECHANISTIC)
    assert config.mode == Mode.MECHANISTIC
    assert config.lam == 8000.0
    assert config.engine.m == 160
    assert config.engine.beta_policy.beta == 0.8
    assert config.engine.ordering is OrderingStrategy.NON_RANDOM
    assert config.generator.case_mix == (0.05, 0.95, 0.0)
    assert config.generator.terms_per_query == (1, 1)
    assert config.truth_terms == 500
    assert config.truth_objects == 1500
    assert config.truth_degree == 40
    assert config.init_links_per_term == 160
    assert config.deconstruct_day == 2.0
    assert config.deconstruct_objects == 5


def test_fractions_are_supported():
    config = parse_config("mode=abstract\nhorizon=90\nseeds=1,2\ns0=100\nalpha=1/20\n")
    assert config.alpha == pytest.approx(0.05)


def test_beta_uniform_literal():
    text = MECHANISTIC.replace("beta = 0.8", "beta = uniform")
    config = parse_config(text)
    assert config.engine.beta_policy.is_uniform


def test_unknown_key_rejected_with_line_number():
    text = "mode = abstract\nbogus = 1\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text, source="conf")
    assert "conf:2" in str(err.value)
    assert "bogus" in str(err.value)


def test_duplicate_key_rejected_with_line_number():
    text = "mode = abstract\nhorizon = 5\nhorizon = 6\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text, source="conf")
    assert "conf:3" in str(err.value)
    assert "duplicate" in str(err.value)


def test_malformed_line_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("mode abstract\n", source="conf")
    assert "conf:1" in str(err.value)


def test_missing_required_key():
    with pytest.raises(ConfigError) as err:
        parse_config("mode = abstract\nhorizon = 90\nseeds = 1\nalpha = 0.1\n")
    assert "s0" in str(err.value)


def test_empty_value_rejected():
    with pytest.raises(ConfigError):
        parse_config("mode =\n")


def test_bad_number_rejected():
    with pytest.raises(ConfigError):
        parse_config("mode=abstract\nhorizon=ninety\nseeds=1\ns0=10\nalpha=0.1\n")
    with pytest.raises(ConfigError):
        parse_config("mode=abstract\nhorizon=90\nseeds=1\ns0=10\nalpha=1/0\n")


def test_mechanistic_alpha_key_rejected():
    text = MECHANISTIC + "alpha = 0.1\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "alpha" in str(err.value)


def test_integer_keys_reject_fractions():
    text = ABSTRACT.replace("s0 = 60000", "s0 = 60000.5")
    with pytest.raises(ConfigError):
        parse_config(text)


def test_bad_ordering_name():
    text = MECHANISTIC.replace("ordering = non_random", "ordering = alphabetical")
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "alphabetical" in str(err.value)


def test_case_mix_needs_three_parts():
    text = MECHANISTIC.replace("case_mix = 0.05, 0.95, 0.0", "case_mix = 0.5, 0.5")
    with pytest.raises(ConfigError):
        parse_config(text)


def test_engine_validation_errors_carry_source():
    text = MECHANISTIC.replace("weight = 1.0", "weight = 2.0")
    with pytest.raises(ConfigError) as err:
        parse_config(text, source="mech.conf")
    assert "mech.conf" in str(err.value)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "exp.conf"
    path.write_text(ABSTRACT)
    config = load_config(path)
    assert config.s0 == 60000
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.conf")

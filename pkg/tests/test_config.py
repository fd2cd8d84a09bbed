import pytest
from hypothesis import given, strategies as st

from gsprecode.config import SimConfig, parse_config, parse_overrides
from gsprecode.errors import ConfigError
from gsprecode.precoders import SchemeSpec

MINIMAL = """\
# capacity sweep
experiment = capacity_vs_snr
n_bs = 64
n_users = 8
snr_db_grid = 0, 10   # two points
schemes = zf, gs:2
"""


def test_minimal_file_gets_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.trials == 200 and cfg.xi == 0.0 and cfg.qam_order == 64
    assert cfg.snr_db_grid == (0.0, 10.0)
    assert cfg.schemes == (SchemeSpec("zf"), SchemeSpec("gs", 2))


def test_zero_users_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config(MINIMAL.replace("n_users = 8", "n_users = 0"))
    assert exc.value.field == "n_users"
    assert exc.value.line == 4


def test_override_precedence():
    cfg = parse_config(MINIMAL, parse_overrides(["snr_db_grid=30"]))
    assert cfg.snr_db_grid == (30.0,)
    base = {"trials": 7, "seed": 3}
    cfg = parse_config(MINIMAL + "seed = 5\n", base=base)
    assert (cfg.trials, cfg.seed) == (7, 5)


@pytest.mark.parametrize("text,field,line", [
    (MINIMAL + "bogus = 1\n", "bogus", 7),
    (MINIMAL + "trials = many\n", "trials", 7),
    (MINIMAL + "schemes = gs\n", "schemes", 7),
    (MINIMAL.replace("n_bs = 64", "n_bs = 4"), "n_bs", 3),
    (MINIMAL + "xi = 1.0\n", "xi", 7),
    (MINIMAL + "trials = 0\n", "trials", 7),
])
def test_errors_name_field_and_line(text, field, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == field
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(MINIMAL + "n_bs = 128\n")


def test_missing_required_key():
    with pytest.raises(ConfigError) as exc:
        parse_config("experiment = capacity_vs_snr\nn_bs = 64\nn_users = 8\nschemes = zf\n")
    assert exc.value.field == "snr_db_grid"
    with pytest.raises(ConfigError) as exc:
        parse_config("n_bs = 64\n")
    assert exc.value.field == "experiment"


def test_malformed_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("experiment capacity_vs_snr\n")
    assert exc.value.line == 1


def test_zone_schemes_rejected_for_linear_experiments():
    with pytest.raises(ConfigError) as exc:
        parse_config(MINIMAL.replace("gs:2", "gs:2:zone:4"))
    assert exc.value.field == "schemes"


def test_division_free_applies_to_gs():
    cfg = parse_config(MINIMAL + "division_free = yes\n")
    assert cfg.schemes[1].division_free and not cfg.schemes[0].division_free


def test_unknown_override_key():
    with pytest.raises(ConfigError) as exc:
        parse_overrides(["nope=3"])
    assert exc.value.field == "nope"
    with pytest.raises(ConfigError):
        parse_overrides(["trials"])


@given(st.lists(st.integers(-20, 40), min_size=1, max_size=6), st.integers(1, 500), st.integers(0, 2**40))
def test_round_trip_values(grid, trials, seed):
    text = MINIMAL.replace("0, 10", ", ".join(map(str, grid))) + f"trials = {trials}\nseed = {seed}\n"
    cfg = parse_config(text)
    assert cfg.snr_db_grid == tuple(float(g) for g in grid)
    assert (cfg.trials, cfg.seed) == (trials, seed)


def test_direct_validation():
    with pytest.raises(ConfigError):
        SimConfig(experiment="nothing").validate()

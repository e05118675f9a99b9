import pytest

from mnqc.config import ConfigError, Grids, RunConfig, parse_config, parse_config_text, parse_grid
from mnqc.m2o import get_preset


def test_defaults():
    cfg = RunConfig()
    assert cfg.preset == "no1" and cfg.pump_power is None
    assert cfg.noise.T1 == 1e-3 and cfg.noise.T2 == 1e-3
    assert cfg.noise.depolarizing_prob == 1e-4
    assert cfg.noise.purification_step_time == 1e-6
    assert get_preset(cfg.preset).name == "no1"
    assert cfg.grids.qv_trials == 100


def test_unknown_preset_lists_valid_ones():
    with pytest.raises(ConfigError, match="future, no1, no2, no3"):
        parse_config_text("[run]\npreset = nope\n")


def test_full_ini_round():
    text = """
[run]
preset = future
power = 2e-3
pe = 0.25
rounds = 2
benchmarks = ghz, qft

[noise]
t1 = 5e-4
T2 = 5e-4

[grids]
pe = lin 0.1 0.5 5
gap_times = geom 1e-8 1e-4 5
qv_trials = 200
"""
    cfg = parse_config_text(text)
    assert cfg.preset == "future" and cfg.pump_power == 2e-3
    assert cfg.benchmarks == ("ghz", "qft") and cfg.rounds == 2
    assert cfg.noise.T1 == 5e-4
    assert cfg.grids.pe == pytest.approx((0.1, 0.2, 0.3, 0.4, 0.5))
    assert cfg.grids.gap_times[-1] == pytest.approx(1e-4)
    assert cfg.grids.qv_trials == 200


@pytest.mark.parametrize(
    "text,line",
    [
        ("[run]\npreset = no1\npe = 0.9\n", 3),
        ("[run]\nrounds = two\n", 2),
        ("[run]\n\ncolour = red\n", 3),
        ("[bogus]\nx = 1\n", 1),
        ("[run]\n[grids]\nqv_trials = 10\n", 3),
        ("preset = no1\n", 1),
    ],
)
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config_text(text, path="run.ini")
    assert info.value.line == line
    assert str(info.value).startswith(f"run.ini:{line}:")


def test_json_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"run": {"preset": "no2", "seed": 4}, "grids": {"pe": [0.1, 0.2]}}')
    cfg = parse_config(p)
    assert cfg.preset == "no2" and cfg.seed == 4 and cfg.grids.pe == (0.1, 0.2)
    p.write_text('{"run": {\n"seed": -1}}')
    with pytest.raises(ConfigError) as info:
        parse_config(p)
    assert info.value.line == 2
    p.write_text('{"run": ')
    with pytest.raises(ConfigError):
        parse_config(p)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "absent.ini")


def test_grid_syntax():
    assert parse_grid("1, 2, 3") == (1.0, 2.0, 3.0)
    assert parse_grid("geom 1 100 3") == pytest.approx((1, 10, 100))
    for bad in ("", "lin 0 1", "geom 1 2 0", "1, nan"):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grids(pe=(0.6,))
    with pytest.raises(ValueError):
        Grids(qv_trials=50)
    with pytest.raises(ValueError):
        Grids(gap_times=())


def test_echo_is_plain():
    echo = RunConfig().echo()
    assert echo["benchmarks"] == ["ghz", "bv"]
    assert isinstance(echo["grids"]["pe"], list)
    assert echo["noise"]["T1"] == 1e-3

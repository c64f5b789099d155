import configparser
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from microdyn.harness.config import SCENARIOS, ExperimentConfig, load_config, validate
from microdyn.harness.experiments import HEADERS, compare_deflections, run_experiment
from microdyn.tables import format_value, read_table, render_table, write_table


def _run(tmp_path, scenario, sub="out", **overrides):
    cfg = validate(ExperimentConfig(scenario=scenario))
    for dotted, value in overrides.items():
        section, key = dotted.split("__")
        setattr(getattr(cfg, section), key, value)
    return run_experiment(cfg, out_dir=tmp_path / sub)


def _meta(path):
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser.read(path)
    return parser


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_each_scenario_writes_documented_header_and_metadata(tmp_path, scenario):
    kw = {"coupled__nx": 32} if scenario == "coupled" else {}
    result = _run(tmp_path, scenario, **kw)
    header, rows = read_table(result.data_path)
    assert tuple(header) == HEADERS[scenario]
    assert rows and all(len(r) == len(header) for r in rows)
    meta = _meta(result.metadata_path)
    for section in ("experiment", "particle", "numerics", "output", "run", "summary"):
        assert meta.has_section(section)
    for key in ("seed", "package_version", "python_version", "numpy_version", "wall_time_s"):
        assert meta.has_option("run", key)


def test_homogeneous_sweep_rows(tmp_path):
    result = _run(tmp_path, "homogeneous")
    _, rows = read_table(result.data_path)
    data = np.array(rows)
    np.testing.assert_allclose(data[:, 0], [0.1 * i for i in range(1, 11)])
    np.testing.assert_allclose(data[:, 1] + data[:, 2], 0, atol=1e-15)
    np.testing.assert_allclose(data[:, 3], -0.5 * data[:, 0] ** 2, rtol=1e-6)
    np.testing.assert_allclose(data[:, 4], -data[:, 5], rtol=1e-12)
    meta = _meta(result.metadata_path)
    assert len(meta["sweep"]["values"].split(",")) == 10


def test_compare_rows_cover_the_default_scales(tmp_path):
    result = _run(tmp_path, "compare")
    _, rows = read_table(result.data_path)
    assert [r[0] for r in rows] == [1.0, 2.0, 4.0, 8.0]
    assert abs(result.summary["exponent_md"] - 2) <= 0.01
    assert abs(result.summary["exponent_qm"] - 1) <= 0.01


def test_compare_deflections_scale_with_force_law():
    cfg = validate(ExperimentConfig(scenario="compare"))
    rows = compare_deflections(cfg, (1.0, 2.0))
    (_, md1, qm1), (_, md2, qm2) = rows
    assert md2 / md1 == pytest.approx(4.0, rel=5e-3)
    assert qm2 / qm1 == pytest.approx(2.0, rel=1e-12)


def test_stern_gerlach_output_is_byte_identical_across_runs(tmp_path):
    a = _run(tmp_path, "stern-gerlach", "a", beam__n_particles=1000, numerics__seed=42)
    b = _run(tmp_path, "stern-gerlach", "b", beam__n_particles=1000, numerics__seed=42)
    assert a.data_path.read_bytes() == b.data_path.read_bytes()
    c = _run(tmp_path, "stern-gerlach", "c", beam__n_particles=1000, numerics__seed=43)
    assert a.data_path.read_bytes() != c.data_path.read_bytes()


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_metadata_alone_reproduces_the_run(tmp_path, scenario):
    kw = {"coupled__nx": 32} if scenario == "coupled" else {}
    first = _run(tmp_path, scenario, "first", **kw)
    cfg = load_config(first.metadata_path)
    second = run_experiment(cfg, out_dir=tmp_path / "second")
    assert first.data_path.read_bytes() == second.data_path.read_bytes()


def test_seed_override_is_recorded(tmp_path):
    cfg = validate(ExperimentConfig(scenario="stern-gerlach"))
    result = run_experiment(cfg, out_dir=tmp_path, seed=9)
    assert _meta(result.metadata_path)["run"]["seed"] == "9"
    assert cfg.numerics.seed == 0


def test_coupled_run_matches_static_oracle(tmp_path):
    result = _run(tmp_path, "coupled", coupled__nx=256)
    assert result.summary["oracle_error_P"] < 1e-3
    assert result.summary["oracle_error_Q"] < 1e-3


@pytest.mark.parametrize("value", [0.0, -0.0, 1.0, -1.5e-300, 1 / 3, math.pi * 1e200,
                                   5e-324, float("inf"), float("nan")])
def test_number_format_round_trips(tmp_path, value):
    path = write_table(tmp_path / "t.csv", ("v",), [(value,)])
    _, rows = read_table(path)
    got = rows[0][0]
    if math.isnan(value):
        assert math.isnan(got)
    else:
        assert got == value and math.copysign(1, got) == math.copysign(1, value)
    assert float(format_value(value)) == value or math.isnan(value)


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_every_emitted_csv_reparses_bit_identically(tmp_path, scenario):
    kw = {"coupled__nx": 16} if scenario == "coupled" else {}
    result = _run(tmp_path, scenario, **kw)
    header, rows = read_table(result.data_path)
    again = write_table(tmp_path / "again.csv", header, rows)
    assert read_table(again) == (header, rows)
    # every float cell is the canonical text of the value it parses to
    for line in result.data_path.read_text().splitlines()[1:]:
        for cell in line.split(","):
            assert format_value(int(cell) if cell.lstrip("-").isdigit() else float(cell)) == cell


@given(st.lists(st.floats(allow_nan=False), min_size=1, max_size=20))
def test_any_finite_or_infinite_float_round_trips(values):
    text = render_table(("v",), [(v,) for v in values])
    parsed = [float(line) for line in text.splitlines()[1:]]
    assert parsed == values
    assert [math.copysign(1, v) for v in parsed] == [math.copysign(1, v) for v in values]

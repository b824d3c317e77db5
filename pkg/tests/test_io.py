"""Tests for config.py, csv_io.py, and util.py"""
import math

import numpy as np
import pytest

from config import DEFAULTS, RunConfig, load_config
from errors import InputError
import csv_io
from inference.discrimination import Classification
from inference.timetrace import DetectionRecord
from motion.fock import fock_distribution_coherent
from specfit.rabi_fit import RabiTrace
from stark.shift import SpectrumRow
from util import compare, split_chunks, text_digest

SPECTRUM_HEADER = "frequency_hz,bright_shift_hz,other_shift_hz\n"

test_cases = {
    "config_text_error": [
        ("n_rep = 22\nfoo\n", "Expected 'key = value'. (test, line 2)"),
        ("foo = 1", "Unknown config key. (foo, test, line 1)"),
        ("seed = 0\n\n# comment\nseed = -3", "Invalid config value. (seed = '-3', test, line 4: "
                                            "seed must be an unsigned 64-bit integer)"),
        ("t729_window_s = 1e-6", "Invalid config value. (t729_window_s = '1e-6', test, line 1: "
                                 "expected two comma-separated values)"),
    ],
    "table_error": [
        ("a,b\n1,2\n", "Unexpected header. (PATH, line 1, expected: frequency_hz,bright_shift_hz,other_shift_hz)"),
        (SPECTRUM_HEADER + "1e14,1,2\n1e14,1\n", "Wrong number of columns. (PATH, line 3)"),
        (SPECTRUM_HEADER + "1e14,x,2\n", "Invalid value for bright_shift_hz. (PATH, line 2: 'x')"),
        (SPECTRUM_HEADER + "nan,1,2\n", "NaN is not allowed for frequency_hz. (PATH, line 2)"),
        (SPECTRUM_HEADER + ",1,2\n", "Missing value for frequency_hz. (PATH, line 2)"),
        ("# only a comment\n", "File has no header. (PATH)"),
    ],
}


def test_bundled_config_matches_defaults():
    config = load_config(environ={})
    for key, (_, default) in DEFAULTS.items():
        assert config[key] == default, key
        assert config.sources[key] == "default"


def test_config_precedence(tmp_path):
    path = tmp_path / "user.cfg"
    path.write_text("n_rep = 30\np_beta = 0.05  # inline comment\n")
    config = load_config(str(path), ["n_rep=40"], environ={})
    assert config["n_rep"] == 40
    assert config["p_beta"] == 0.05
    assert config.sources["n_rep"] == "command line"
    assert config.sources["p_beta"] == f"{path}, line 2"
    assert config["p_alpha"] == 0.52


def test_config_environment(tmp_path):
    env_path = tmp_path / "env.cfg"
    env_path.write_text("n_rep = 12\n")
    other_path = tmp_path / "other.cfg"
    other_path.write_text("n_rep = 13\n")
    assert load_config(environ={"QND_TOOLS_CONFIG": str(env_path)})["n_rep"] == 12
    # --config wins over the environment
    assert load_config(str(other_path), environ={"QND_TOOLS_CONFIG": str(env_path)})["n_rep"] == 13
    with pytest.raises(InputError) as e:
        load_config(environ={"QND_TOOLS_CONFIG": str(tmp_path / "missing.cfg")})
    assert str(e.value) == f"Config file not found. ({tmp_path / 'missing.cfg'})"


@pytest.mark.parametrize("text, error", test_cases["config_text_error"])
def test_config_text_errors(text, error):
    config = RunConfig()
    with pytest.raises(InputError) as e:
        config.update_text(text, "test")
    assert str(e.value) == error


def test_config_values():
    config = RunConfig()
    config.update_overrides(["seed=0x10", "t2_s=inf", "fidelity_targets=0.9, 0.99", "t729_window_s=1e-6,2e-6"])
    assert config["seed"] == 16
    assert math.isinf(config["t2_s"])
    assert config["fidelity_targets"] == (0.9, 0.99)
    assert config["t729_window_s"] == (1e-6, 2e-6)
    snapshot = config.snapshot()
    assert snapshot["t2_s"] == "inf"
    assert snapshot["fidelity_targets"] == [0.9, 0.99]
    with pytest.raises(InputError) as e:
        config.update_overrides(["n_rep"])
    assert str(e.value) == "Expected key=value. (n_rep)"
    with pytest.raises(InputError) as e:
        config["missing"]
    assert str(e.value) == "Unknown config key. (missing)"


@pytest.mark.parametrize("text, error", test_cases["table_error"])
def test_read_table_errors(tmp_path, text, error):
    path = str(tmp_path / "spectrum.csv")
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    with pytest.raises(InputError) as e:
        csv_io.read_spectrum(path)
    assert str(e.value) == error.replace("PATH", path)


def test_spectrum_masked_values(tmp_path):
    path = str(tmp_path / "spectrum.csv")
    rows = [SpectrumRow(3.8e14, -1.25e3, 0.0), SpectrumRow(3.8e14 + 1e9, None, None)]
    csv_io.write_spectrum(path, rows)
    with open(path, encoding="utf-8") as f:
        assert f.read().splitlines()[2] == "380001000000000.0,,"
    assert csv_io.read_spectrum(path) == rows
    assert csv_io.read_spectrum(tmp_path / "spectrum.csv") == rows


def test_timetrace_file(tmp_path):
    path = str(tmp_path / "timetrace.csv")
    bright, dark = Classification.BRIGHT, Classification.DARK
    records = [DetectionRecord(0, 12, 22, 12 / 22, bright, bright),
               DetectionRecord(1, 3, 21, 3 / 21, dark, bright),
               DetectionRecord(2, 0, 0, 0.0, dark, dark)]
    csv_io.write_timetrace(path, records)
    with open(path, encoding="utf-8") as f:
        assert f.read().splitlines()[1] == f"0,12,22,{repr(12 / 22)},bright,bright"
    assert csv_io.read_timetrace(path) == records


def test_rabi_trace_file(tmp_path):
    path = str(tmp_path / "trace.csv")
    trace = RabiTrace(np.linspace(0, 1e-4, 5), np.array([0.0, 0.1, 0.4, 0.3, 0.2]), 200)
    csv_io.write_rabi_trace(path, trace)
    loaded = csv_io.read_rabi_trace(path)
    assert np.array_equal(loaded.t, trace.t)
    assert np.array_equal(loaded.p_excite, trace.p_excite)
    assert np.all(loaded.n_shots == 200)
    # traces without n_shots fall back to the default
    with open(path, "w", encoding="utf-8") as f:
        f.write("t_s,p_excite\n0,0.0\n1e-5,0.2\n")
    assert np.all(csv_io.read_rabi_trace(path).n_shots == csv_io.DEFAULT_N_SHOTS)
    with open(path, "w", encoding="utf-8") as f:
        f.write("t_s,p_excite\n")
    with pytest.raises(InputError) as e:
        csv_io.read_rabi_trace(path)
    assert str(e.value) == f"Rabi trace is empty. ({path})"


def test_manifest_paths(tmp_path):
    folder = tmp_path / "traces"
    path = str(folder / "manifest.csv")
    csv_io.write_table(path, csv_io.MANIFEST_HEADER, [(1e3, "a.csv"), (2e3, "sub/b.csv")])
    assert csv_io.read_manifest(path) == [(1e3, str(folder / "a.csv")), (2e3, str(folder / "sub" / "b.csv"))]


def test_distribution_file(tmp_path):
    path = str(tmp_path / "distribution.csv")
    dist = fock_distribution_coherent(1.0, 12)
    csv_io.write_distribution(path, dist)
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    assert lines[0] == "n,probability"
    assert len(lines) == 14
    assert lines[1] == f"0,{repr(float(dist.probabilities[0]))}"


def test_json_file(tmp_path):
    path = str(tmp_path / "data.json")
    csv_io.write_json(path, {"inf": math.inf, "array": np.arange(3), "flag": np.bool_(True), 1: np.int64(4)})
    assert csv_io.read_json(path) == {"inf": "inf", "array": [0, 1, 2], "flag": True, "1": 4}
    # path-like objects work too
    assert csv_io.read_json(tmp_path / "data.json")["1"] == 4
    with open(path, "w", encoding="utf-8") as f:
        f.write("{\n  \"a\": 1,\n}\n")
    with pytest.raises(InputError) as e:
        csv_io.read_json(path)
    assert str(e.value) == f"Invalid JSON. ({path}, line 3)"


def test_util(tmp_path):
    assert split_chunks(list(range(7)), 3) == [[0, 1, 2], [3, 4, 5], [6]]
    assert text_digest("ab", "c") != text_digest("a", "bc")
    file1 = tmp_path / "a.bin"
    file2 = tmp_path / "b.bin"
    file1.write_bytes(b"abcd")
    file2.write_bytes(b"abXd")
    compare(str(file1), str(file1))
    with pytest.raises(RuntimeError) as e:
        compare(str(file1), str(file2))
    assert str(e.value) == f"Files differ at byte 2. ({file1}, {file2})"

"""
Tests for config parsing and the command-line subcommands
"""
import copy
import json
import os

import pytest

from cli.experiment_config import parse_config
from cli.main import EXIT_CONFIG, EXIT_OK, run
from helper.exceptions import ConfigError
from settings import settings

CUBIC = [
    {"a": 2, "b": 1, "x_modes": [[0, [1.0, 0.0]]]},
    {"a": 1, "b": 2, "x_modes": [[0, [1.0, 0.0]]]},
]

BASE = {
    "lattice": {"theta": 1, "J": 3},
    "potential": {"m": 1.0, "seed": 11},
    "nonlinearity": {"terms": CUBIC},
    "nf": {"gamma": 1e-3, "alpha": 2.0, "N": 3, "r_star": 1},
    "integrate": {"T": 0.1},
    "experiment": {
        "ladder": [0.01, 0.02, 0.04, 0.08],
        "gammas": [0.1],
        "Ns": [2],
        "r": 3,
        "samples": 100,
        "epsilon": [1e-2],
        "n_states": 5,
    },
}


def _config(tmp_path, name="config.json", **overrides) -> str:
    document = copy.deepcopy(BASE)
    for section, values in overrides.items():
        document[section] = dict(document.get(section) or {}, **values)
    path = tmp_path / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


@pytest.fixture
def restore_threads(monkeypatch):
    monkeypatch.setattr(settings, "WORKER_THREADS", settings.WORKER_THREADS)


def test_zero_mode_with_w1_points_at_lattice():
    document = copy.deepcopy(BASE)
    document["lattice"]["include_zero"] = True
    with pytest.raises(ConfigError) as info:
        parse_config(document)
    assert info.value.field == "lattice"


def test_unpaired_nonlinearity_is_reported():
    document = copy.deepcopy(BASE)
    document["nonlinearity"]["terms"] = CUBIC[:1]
    with pytest.raises(ConfigError, match="unpaired"):
        parse_config(document)


def test_cutoff_larger_than_lattice_is_rejected():
    document = copy.deepcopy(BASE)
    document["nf"]["N"] = 4
    with pytest.raises(ConfigError):
        parse_config(document)


def test_sobolev_index_falls_back_to_nf():
    config = parse_config(copy.deepcopy(BASE))
    assert config.p == 2.0
    assert config.degree() == 3


def test_bad_config_exits_with_config_code(tmp_path, restore_threads):
    path = _config(tmp_path, lattice={"include_zero": True})
    assert run(["build", "--config", path, "--out", str(tmp_path / "H")]) == EXIT_CONFIG
    missing = str(tmp_path / "missing.json")
    assert run(["build", "--config", missing, "--out", str(tmp_path / "H")]) == EXIT_CONFIG


def test_measure_without_grid_is_a_config_error(tmp_path, restore_threads):
    path = _config(tmp_path, experiment={"gammas": []})
    assert run(["measure", "--config", path, "--out", str(tmp_path / "m")]) == EXIT_CONFIG


def test_build_is_byte_reproducible(tmp_path, restore_threads):
    path = _config(tmp_path)
    assert run(["--threads", "1", "build", "--config", path, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert settings.WORKER_THREADS == 1
    assert run(["--threads", "3", "build", "--config", path, "--out", str(tmp_path / "b")]) == EXIT_OK
    assert settings.WORKER_THREADS == 3
    for name in ("P.jsonl", "frequencies.csv", "hamiltonian.json", "structure.json"):
        first = (tmp_path / "a" / name).read_bytes()
        assert first == (tmp_path / "b" / name).read_bytes()


def test_pipeline(tmp_path, restore_threads):
    path = _config(tmp_path)
    H, nf = str(tmp_path / "H"), str(tmp_path / "nf")
    assert run(["build", "--config", path, "--out", H]) == EXIT_OK
    assert run(["normalform", "--config", path, "--hamiltonian", H, "--out", nf]) == EXIT_OK
    assert os.path.exists(os.path.join(nf, "certificate.json"))
    assert run(["scan", "--config", path, "--hamiltonian", H, "--out", str(tmp_path / "scan")]) == EXIT_OK
    assert run(["verify", "--config", path, "--hamiltonian", H, "--normalform", nf,
                "--out", str(tmp_path / "verify")]) == EXIT_OK
    assert run(["scaling", "--config", path, "--hamiltonian", H, "--normalform", nf,
                "--out", str(tmp_path / "scaling")]) == EXIT_OK
    assert os.path.exists(str(tmp_path / "scaling" / "scaling_normalform.csv"))
    assert run(["simulate", "--config", path, "--hamiltonian", H, "--out", str(tmp_path / "sim")]) == EXIT_OK
    assert os.path.exists(str(tmp_path / "sim" / "trajectory_0.csv"))


def test_measure_and_stability(tmp_path, restore_threads):
    path = _config(tmp_path)
    assert run(["--threads", "2", "measure", "--config", path, "--out", str(tmp_path / "m")]) == EXIT_OK
    assert os.path.exists(str(tmp_path / "m" / "measure.csv"))
    stability = _config(tmp_path, "stability.json", experiment={"kind": "stability", "epsilon": [1e-2, 2e-2]})
    assert run(["simulate", "--config", stability, "--out", str(tmp_path / "st")]) == EXIT_OK
    assert os.path.exists(str(tmp_path / "st" / "stability.csv"))


def test_hamiltonian_from_another_lattice_is_rejected(tmp_path, restore_threads):
    path = _config(tmp_path)
    other = _config(tmp_path, "other.json", lattice={"J": 2}, nf={"N": 2})
    H = str(tmp_path / "H")
    assert run(["build", "--config", other, "--out", H]) == EXIT_OK
    assert run(["scan", "--config", path, "--hamiltonian", H, "--out", str(tmp_path / "scan")]) == EXIT_CONFIG

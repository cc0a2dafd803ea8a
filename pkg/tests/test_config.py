import json
import logging

import pytest

from gbeta_lab.config import BoundaryConfig, ScanConfig
from gbeta_lab.logger import get_logger, set_verbosity
from gbeta_lab.utils import atomic_write, format_bytes, format_float, timed


def test_scan_config_defaults():
    config = ScanConfig()

    assert config.mode == "random"
    assert not config.explicit
    assert json.loads(config.to_json())["n_range"] == [2, 4]


@pytest.mark.parametrize(
    "overrides",
    [
        {"mode": "grid"},
        {"n_range": (2, 3, 4)},
        {"sample_count": -1},
        {"coefficient_bound": 1},
        {"classical_share": 1.5},
    ],
)
def test_scan_config_validation(overrides):
    with pytest.raises(ValueError):
        ScanConfig(**overrides)


def test_scan_config_from_json(tmp_path):
    path = tmp_path / "scan.json"
    path.write_text(json.dumps({"criterion_sources": [[3, 1, -1]], "seed": 9}))

    config = ScanConfig.from_json(path)
    assert config.criterion_sources == ((3, 1, -1),)
    assert config.explicit
    assert config.seed == 9

    path.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ValueError):
        ScanConfig.from_json(path)


def test_overrides_skip_missing_flags():
    config = ScanConfig(seed=3).with_overrides(seed=None, sample_count=7)

    assert config.seed == 3
    assert config.sample_count == 7


def test_boundary_config():
    config = BoundaryConfig((0.5, 1.0))

    assert config.truncation == 400
    assert config.jobs == 1
    assert not config.certify


def test_atomic_write(tmp_path):
    path = tmp_path / "out.txt"

    assert atomic_write(path, "héllo") == 6
    assert path.read_text(encoding="utf-8") == "héllo"

    atomic_write(path, b"bytes")
    assert path.read_bytes() == b"bytes"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_formatting():
    assert format_bytes(512) == "512.0B"
    assert format_bytes(2048) == "2.0KB"
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(3) == "3"


def test_timed_logs_at_debug(caplog):
    logger = get_logger("tests")

    @timed(logger)
    def add(a, b):
        return a + b

    set_verbosity(verbose=True)
    try:
        with caplog.at_level(logging.DEBUG, logger="GBetaLab"):
            assert add(1, 2) == 3
    finally:
        set_verbosity()

    assert any("add took" in message for message in caplog.messages)


def test_verbosity_levels():
    root = logging.getLogger("GBetaLab")

    set_verbosity(quiet=True)
    assert root.level == logging.WARNING

    set_verbosity(verbose=True)
    assert root.level == logging.DEBUG

    set_verbosity()
    assert root.level == logging.INFO

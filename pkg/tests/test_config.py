import json

import pytest

from escrowmarket.config import NodeConfig, load_config
from escrowmarket.errors import ParseError


def test_defaults():
    cfg = load_config(env={})
    assert cfg.port == 8990
    assert cfg.gas_fee == 1
    assert cfg.mode == "sandbox"
    assert cfg.genesis == {}


def test_file_then_env_then_flags(tmp_path):
    path = tmp_path / "node.json"
    path.write_text(json.dumps({
        "port": 7001, "gas_fee": "3", "mode": "assertion",
        "genesis": {"alice": "500"}}))

    cfg = load_config(str(path), env={})
    assert (cfg.port, cfg.gas_fee, cfg.mode) == (7001, 3, "assertion")
    assert cfg.genesis == {"alice": 500}

    cfg = load_config(str(path), env={"EMARKET_PORT": "7002"})
    assert cfg.port == 7002

    cfg = load_config(str(path), env={"EMARKET_PORT": "7002"}, port=7003)
    assert cfg.port == 7003


def test_bad_config_rejected(tmp_path):
    path = tmp_path / "node.json"
    path.write_text("{broken")
    with pytest.raises(ParseError):
        load_config(str(path))

    path.write_text(json.dumps({"bogus_key": 1}))
    with pytest.raises(ParseError):
        load_config(str(path))

    with pytest.raises(ParseError):
        NodeConfig(mode="yolo")

    with pytest.raises(ParseError):
        load_config(None, env={}, gas_fee="-2")

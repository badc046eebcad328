"""Test __main__.py"""

import os
import sys
import json
import shutil
import tempfile

import pytest

from sbfolio import api, schema
from sbfolio.__main__ import main

self = sys.modules[__name__]


def setup_module():
    self.tempdir = tempfile.mkdtemp()


def teardown_module():
    shutil.rmtree(self.tempdir)


def write_config(name, **config):
    config.setdefault("schema", schema.identifier("experiment"))
    fname = os.path.join(self.tempdir, name + ".json")

    with open(fname, "w") as f:
        json.dump(config, f)

    return fname


def test_list_presets(capsys):
    assert main(["--list-presets"]) == 0

    printed = capsys.readouterr().out.split()
    assert "fig8" in printed
    assert "fig7a" in printed

    # Main leaves the session as it found it
    assert not api.is_installed()


def test_generate_market():
    fname = write_config("market", command="generate-market",
                         market={"n_assets": 3, "horizon": 2})
    out = os.path.join(self.tempdir, "market")

    assert main(["generate-market", "--config", fname,
                 "--seed", "3", "--out", out]) == 0

    assert sorted(os.listdir(out)) == ["metadata.json", "scenario.json"]

    scenario = api.MarketScenario.load(os.path.join(out, "scenario.json"))
    assert scenario == api.generate_scenario(
        api.MarketConfig(n_assets=3, horizon=2, seed=3))

    with open(os.path.join(out, "metadata.json")) as f:
        metadata = json.load(f)

    assert metadata["config"]["seed"] == 3
    assert metadata["name"] == "market"


def test_verb_overrides_command():
    """The verb given on the command line runs, whatever the file says"""
    fname = write_config("verb", command="trajectory",
                         market={"n_assets": 2, "horizon": 1})
    out = os.path.join(self.tempdir, "verb")

    assert main(["generate-market", "--config", fname, "--out", out]) == 0
    assert "scenario.json" in os.listdir(out)


def test_failure_returns_non_zero():
    fname = write_config("invalid", command="trajectory",
                         market={"n_assets": 2, "horizon": 1},
                         portfolio={"gamma": 1.0, "unit_cap": 3})
    out = os.path.join(self.tempdir, "invalid")

    assert main(["trajectory", "--config", fname, "--out", out]) == 1
    assert not os.path.exists(out)


def test_missing_arguments():
    with pytest.raises(SystemExit):
        main(["trajectory"])

    with pytest.raises(SystemExit):
        main(["not-a-verb", "--config", "fig8"])

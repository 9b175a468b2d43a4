import json

import pytest

from config import SAMPLES_DIR, SECTION_FOR_COMMAND, RunConfig, load_params
from errors import ConfigError


@pytest.mark.parametrize("section", sorted(set(SECTION_FOR_COMMAND.values())))
def test_shipped_samples_validate(section):
    data = load_params(SAMPLES_DIR / f"{section}.json")
    assert section in data


def test_unknown_key_is_rejected(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"schema_version": 1, "block": {"theta_0": "1/3", "colour": "red"}}))
    with pytest.raises(ConfigError) as err:
        load_params(path)
    assert err.value.key == "block"


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_params(tmp_path / "nope.json")


def test_overrides_win_over_the_file():
    cfg = RunConfig("tau", params={"tau": {"kind": "VI_at_0", "order": 4}}, overrides={"order": 6, "kind": None})
    assert cfg.section() == {"kind": "VI_at_0", "order": 6}
    assert cfg.to_json()["resolved"]["order"] == 6

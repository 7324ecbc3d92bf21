"""Unit tests for `dcqd/config.py`"""

import os
from pathlib import Path
from typing import Iterator

import pytest

from dcqd.config import Consts, Settings, load_settings, search_settings_path
from dcqd.util import ini_file_reader

from unit.util import resource


@pytest.fixture(name="config_home")
def create_config_home(tmp_path: Path) -> Iterator[Path]:
    """point $XDG_CONFIG_HOME to an empty directory and clear $DCQD_CONFIG for a test"""
    saved = {var: os.environ.get(var) for var in ("XDG_CONFIG_HOME", Consts.config_env_var())}
    os.environ["XDG_CONFIG_HOME"] = str(tmp_path)
    os.environ.pop(Consts.config_env_var(), None)
    try:
        yield tmp_path
    finally:
        for var, value in saved.items():
            if value is None:
                os.environ.pop(var, None)
            else:
                os.environ[var] = value


def test_consts():
    """check the constants defined in :class:`Consts`"""
    assert Consts.program_name() == "dcqd"
    assert Consts.config_env_var() == "DCQD_CONFIG"
    assert Consts.settings_file() == "settings.ini"
    assert Consts.verify_primes() == (2, 3, 5, 7)
    assert Consts.default_seed() == 7


def test_packaged_settings(config_home: Path):
    """the packaged settings file holds the defaults of :class:`Settings`"""
    path = search_settings_path()
    assert path.name == "settings.ini"
    assert not str(path).startswith(str(config_home))
    assert load_settings() == Settings()


def test_explicit_settings(config_home: Path):
    """an explicit file overrides only the keys it sets"""
    settings = load_settings(resource("settings-random.ini"))
    assert settings.alpha_policy == "random"
    assert settings.workers == 2
    assert settings.rank_threshold == Settings().rank_threshold
    assert settings.dimension_cap == 4096
    with pytest.raises(ValueError, match="uniform"):
        load_settings(resource("settings-bad-policy.ini"))
    with pytest.raises(FileNotFoundError):
        load_settings(str(config_home / "missing.ini"))


def test_settings_search_order(config_home: Path):
    """$DCQD_CONFIG is preferred to the user file which is preferred to the packaged one"""
    user_file = config_home / "dcqd" / "settings.ini"
    user_file.parent.mkdir()
    user_file.write_text("[numerics]\nrank_threshold = 1e-6\n", encoding="utf-8")
    assert search_settings_path() == user_file
    assert load_settings().rank_threshold == 1e-6
    os.environ[Consts.config_env_var()] = resource("settings-random.ini")
    assert load_settings().alpha_policy == "random"
    os.environ[Consts.config_env_var()] = str(config_home / "missing.ini")
    with pytest.raises(FileNotFoundError, match="DCQD_CONFIG"):
        load_settings()


def test_ini_file_reader():
    """keys are case-sensitive unless requested otherwise"""
    lines = ["[probes]\n", "Alpha_Ratio = 0.5\n"]
    assert ini_file_reader(lines).get("probes", "Alpha_Ratio") == "0.5"
    assert not ini_file_reader(lines).has_option("probes", "alpha_ratio")
    assert ini_file_reader(lines, case_sensitive=False).get("probes", "alpha_ratio") == "0.5"


if __name__ == "__main__":
    pytest.main([__file__, "-s"])

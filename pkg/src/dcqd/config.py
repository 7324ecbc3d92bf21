"""
Numeric settings of the simulator, their INI configuration file and fixed constants.
"""

import os
from dataclasses import dataclass, fields
from importlib.abc import Traversable
from importlib.resources import files
from pathlib import Path
from typing import Optional, Union

from .util import ini_file_reader

PathName = Union[Path, Traversable]


class Consts:
    """
    Defines fixed constants used by the `dcqd` package and its commands.
    """

    @staticmethod
    def program_name() -> str:
        """name of the program recorded in the run reports"""
        return "dcqd"

    @staticmethod
    def config_env_var() -> str:
        """environment variable that can point to a custom settings file"""
        return "DCQD_CONFIG"

    @staticmethod
    def settings_file() -> str:
        """name of the settings file searched in the configuration directories"""
        return "settings.ini"

    @staticmethod
    def verify_primes() -> tuple[int, ...]:
        """dimensions accepted by `dcqd-verify` (brute-force enumeration stays small for these)"""
        return 2, 3, 5, 7

    @staticmethod
    def default_seed() -> int:
        """seed used when none is given on the command-line"""
        return 7


@dataclass(frozen=True)
class Settings:
    """
    Numeric knobs of the simulation and reconstruction.

    Attributes:
        matrix_tolerance: tolerance for Hermiticity, positivity, trace and eigen-equation checks
        undefined_probability: outcome probability below which normalizer expectations
                               are reported as undefined
        rank_threshold: singular values below this times the largest one count as zero
        alpha_ratio: modulus ratio between consecutive coefficients of the geometric probe profile
        alpha_tolerance: smallest probe-condition margin accepted as nonzero
        alpha_policy: default policy for the probe coefficients, one of `geometric` or `random`
        dimension_cap: largest total dense dimension for multi-qudit population runs
        workers: number of threads simulating configurations, 0 means serial
    """
    matrix_tolerance: float = 1e-10
    undefined_probability: float = 1e-12
    rank_threshold: float = 1e-8
    alpha_ratio: float = 0.8
    alpha_tolerance: float = 1e-6
    alpha_policy: str = "geometric"
    dimension_cap: int = 4096
    workers: int = 0


# section of the settings file that holds each of the `Settings` fields
_SECTIONS = {
    "matrix_tolerance": "numerics", "undefined_probability": "numerics",
    "rank_threshold": "numerics", "alpha_ratio": "probes", "alpha_tolerance": "probes",
    "alpha_policy": "probes", "dimension_cap": "simulation", "workers": "simulation",
}


def search_settings_path(explicit: Optional[str] = None) -> PathName:
    """
    Search for the settings file: an explicit path, then `$DCQD_CONFIG`, then the user
    configuration directory, and finally the default file packaged with `dcqd`.

    :param explicit: path given on the command-line, if any
    :return: the path of the settings file as `Path` or packaged resource (`Traversable`)
    """
    if explicit:
        if not os.access(explicit, os.R_OK):
            raise FileNotFoundError(f"Settings file '{explicit}' does not exist or not readable")
        return Path(explicit)
    if env_path := os.environ.get(Consts.config_env_var()):
        if not os.access(env_path, os.R_OK):
            raise FileNotFoundError(f"Settings file '{env_path}' in ${Consts.config_env_var()} "
                                    "does not exist or not readable")
        return Path(env_path)
    config_home = os.environ.get("XDG_CONFIG_HOME") or os.path.expanduser("~/.config")
    user_path = Path(config_home, Consts.program_name(), Consts.settings_file())
    if os.access(user_path, os.R_OK):
        return user_path
    return files("dcqd").joinpath("conf").joinpath(Consts.settings_file())


def load_settings(explicit: Optional[str] = None) -> Settings:
    """
    Read `Settings` from the settings file found by :func:`search_settings_path`; keys that are
    absent in the file keep their defaults.

    :param explicit: path given on the command-line, if any
    :return: the loaded `Settings`
    """
    path = search_settings_path(explicit)
    with path.open("r", encoding="utf-8") as settings_fd:
        config = ini_file_reader(settings_fd)
    defaults = Settings()
    values: dict[str, Union[int, float, str]] = {}
    for fld in fields(Settings):
        section = _SECTIONS[fld.name]
        if not config.has_option(section, fld.name):
            continue
        default = getattr(defaults, fld.name)
        if isinstance(default, int):
            values[fld.name] = config.getint(section, fld.name)
        elif isinstance(default, float):
            values[fld.name] = config.getfloat(section, fld.name)
        else:
            values[fld.name] = config.get(section, fld.name, fallback=default) or default
    settings = Settings(**values)  # type: ignore
    if settings.alpha_policy not in ("geometric", "random"):
        raise ValueError(f"Unknown alpha_policy '{settings.alpha_policy}' in '{path}'")
    return settings

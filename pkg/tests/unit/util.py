"""some common utility functions used by the unit tests"""

import os
from typing import Optional, Sequence

import numpy as np

from dcqd.channels import ChiMatrix, random_cp_map
from dcqd.protocol import (AlphaPolicy, ExperimentalConfiguration, OutcomeRecord,
                           enumerate_configurations, simulate)
from dcqd.reconstruct import Reconstruction, assemble_system, solve_chi

RESOURCES_DIR = f"{os.path.dirname(__file__)}/../resources"


def resource(name: str) -> str:
    """path of a file in the test resources directory"""
    return f"{RESOURCES_DIR}/{name}"


def random_chi(d: int, seed: int, trace_preserving: bool = True, n_qudits: int = 1,
               rank: Optional[int] = None) -> ChiMatrix:
    """
    Random valid process matrix of full Kraus rank (unless `rank` is given).

    :param d: prime dimension
    :param seed: seed of the random map
    :param trace_preserving: whether the map preserves the trace
    :param n_qudits: number of qudits
    :param rank: number of Kraus operators, d^{2n} by default
    :return: the `ChiMatrix`
    """
    return random_cp_map(d, n_qudits, rank or d ** (2 * n_qudits), trace_preserving, seed)


def exact_run(chi: ChiMatrix, policy: Optional[AlphaPolicy] = None
              ) -> tuple[list[ExperimentalConfiguration], list[OutcomeRecord]]:
    """configurations of the map's dimension and their exact records"""
    configs = enumerate_configurations(chi.d, policy)
    return configs, simulate(chi, configs)


def reconstruct_exact(chi: ChiMatrix, trace_preserving: bool = False,
                      configs: Optional[Sequence[ExperimentalConfiguration]] = None
                      ) -> Reconstruction:
    """recover χ from exact statistics of all configurations"""
    if configs is None:
        configs = enumerate_configurations(chi.d)
    records = simulate(chi, configs)
    return solve_chi(assemble_system(configs, records, trace_preserving))


def max_abs(first: np.ndarray, second: np.ndarray) -> float:
    """largest absolute elementwise difference"""
    return float(np.max(np.abs(np.asarray(first) - np.asarray(second))))

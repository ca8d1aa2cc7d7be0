"""Algorithm registry keyed by CLI name."""

from ..errors import ConfigError
from .base import Algorithm, GradientAlgorithm, soft_threshold
from .first_order import ALMA, OGD, PA1, PA2, RDA, PassiveAggressive, Perceptron
from .second_order import (
    AROW,
    CW,
    ECCW,
    SOP,
    AdaFOBOS,
    AdaFOBOSL1,
    AdaRDA,
    AdaRDAL1,
    DEFAULT_PHI,
)
from .sparse import STG, ErdaL1, FobosL1, RdaL1

_ROSTER = (
    Perceptron(),
    OGD(),
    PassiveAggressive(),
    PA1(),
    PA2(),
    ALMA(),
    RDA(),
    SOP(),
    CW(),
    ECCW(),
    AROW(),
    AdaFOBOS(),
    AdaRDA(),
    STG(),
    FobosL1(),
    RdaL1(),
    ErdaL1(),
    AdaFOBOSL1(),
    AdaRDAL1(),
)

ALGORITHMS = {algo.name: algo for algo in _ROSTER}


def algorithm_names():
    return list(ALGORITHMS)


def get_algorithm(name):
    try:
        return ALGORITHMS[name]
    except KeyError:
        known = ", ".join(ALGORITHMS)
        raise ConfigError(f"unknown algorithm {name!r}; choose one of: {known}")

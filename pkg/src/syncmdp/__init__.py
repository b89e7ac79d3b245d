"""Deciders and strategy synthesis for synchronizing objectives in MDPs."""

from .afa import Afa
from .deciders import TargetSpec, Verdict, classify, decide
from .errors import NotWinningError, ResourceCapError
from .mdp import Lasso, Mdp, dirac, pre, pre_k, pre_lasso, uniform
from .strategy import EpsilonSchedule, Transducer, symbolic_outcome

__all__ = [
    "Afa",
    "EpsilonSchedule",
    "Lasso",
    "Mdp",
    "NotWinningError",
    "ResourceCapError",
    "TargetSpec",
    "Transducer",
    "Verdict",
    "classify",
    "decide",
    "dirac",
    "pre",
    "pre_k",
    "pre_lasso",
    "symbolic_outcome",
    "uniform",
]

"""Quotients of free groups: Schreier graphs, cogrowth and spectral bounds.

Set ``FREEQUOT_DISABLE_NUMBA=1`` before import to run the pure-Python kernels.
"""

from ._accel import USING_NUMBA
from .schreier import (
    SchreierGraph,
    build_graph,
    load_graph,
    preset_relators,
    todd_coxeter,
    truncated_quotient,
)
from .words import ReducedWord, parse_relators, parse_word, reduce

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA",
    "ReducedWord",
    "SchreierGraph",
    "build_graph",
    "load_graph",
    "parse_relators",
    "parse_word",
    "preset_relators",
    "reduce",
    "todd_coxeter",
    "truncated_quotient",
]

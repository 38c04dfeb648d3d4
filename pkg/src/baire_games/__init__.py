"""Exact simulator for topological games that characterize Baire class 1
functions, equi-Baire 1 families and measurable functions."""

from .arena import MatchConfig, play_match, referee
from .catalog import gauge, lookup
from .exactnum import CantorPoint, QuadPoint, parse_point

__all__ = ["CantorPoint", "MatchConfig", "QuadPoint", "gauge", "lookup", "parse_point", "play_match", "referee"]
__version__ = "0.1.0"

"""Directed trade graph and preferential sampling."""

from .sampling import SumTree
from .trade_graph import DegreeHistogram, Direction, TradeGraph, new_graph

__all__ = ["TradeGraph", "Direction", "DegreeHistogram", "SumTree", "new_graph"]

"""Validated numerics for the spread of graphs and stepgraphons."""

__version__ = "0.1.0"

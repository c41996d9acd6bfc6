"""Call-graph extraction and network analysis for Solidity dApps."""

from dappnet.graph import WeightedDigraph

__all__ = ["WeightedDigraph"]
__version__ = "0.1.0"

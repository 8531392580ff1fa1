"""Constructive tools around sparse induced subgraphs of large treewidth."""

__version__ = "0.1.0"

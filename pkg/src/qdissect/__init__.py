"""Exact q-series engine and certificate verifier for a 7-dissection of overpartition rank generating functions."""

__version__ = "0.1.0"

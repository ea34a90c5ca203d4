"""Proof-net prover and parser for NL-lambda."""

__version__ = "0.1.0"

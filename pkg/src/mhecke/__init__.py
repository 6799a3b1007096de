"""Twisted product expansions, multiplicative Hecke operators and twisted traces."""

from .field import QuadTowerNumber, kronecker, sqrt_of

__version__ = "0.1.0"

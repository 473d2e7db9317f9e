"""Moment-matrix relaxations for causal compatibility in the tripartite line network."""

from netsdp.algebra import CLASSICAL, QUANTUM
from netsdp.sdp import HAVE_EXTENSION

__version__ = "0.1.0"
__all__ = ["CLASSICAL", "QUANTUM", "HAVE_EXTENSION", "__version__"]

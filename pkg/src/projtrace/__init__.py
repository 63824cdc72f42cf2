"""Exact computations with trace ideals and countably generated projective
modules over finite tabulated rings."""

from .config import DEFAULT, Limits
from .errors import ProjTraceError
from .ideals import IdealHandle, close, enumerate_ideals
from .ring import RingMatrix, RingTable, parse_preset, preset_ring
from .telescope import Telescope

__all__ = ["DEFAULT", "Limits", "ProjTraceError", "IdealHandle", "close", "enumerate_ideals",
           "RingMatrix", "RingTable", "parse_preset", "preset_ring", "Telescope"]
__version__ = "0.1.0"

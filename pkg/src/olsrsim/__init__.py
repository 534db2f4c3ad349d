"""Discrete-event simulator for static wireless mesh networks running OLSR
with pluggable link-quality routing metrics (hop count, ETX, invETX, ML, MD)."""

from .metrics import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

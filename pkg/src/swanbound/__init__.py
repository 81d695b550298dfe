"""Exponential sums on curves over finite fields: L-functions, Newton polygons and Hodge bounds."""

from __future__ import annotations

__version__ = "0.1.0"

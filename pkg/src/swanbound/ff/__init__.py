"""Finite-field towers, polynomials over them, and vectorized field tables."""

from .tower import DEFAULT_BUDGET, FFElement, FieldTower, build_tower, embedding

__all__ = ["DEFAULT_BUDGET", "FFElement", "FieldTower", "build_tower", "embedding"]

"""Tensor and holographic compositional semantics."""

__version__ = "0.1.0"

"""Narrow one-hidden-layer networks: mirrored init, paired head, projected GD."""

__version__ = "0.1.0"

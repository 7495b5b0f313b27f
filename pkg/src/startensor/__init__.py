"""Exact algebra for modules with involutive endomorphism rings."""

__version__ = "0.1.0"

"""Fractional linear cycles in Bloch's cubical higher Chow complex over small prime fields."""

__version__ = "0.1.0"

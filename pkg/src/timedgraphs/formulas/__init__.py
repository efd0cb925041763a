"""Generators of formulas for realizability, timing and timed systems."""

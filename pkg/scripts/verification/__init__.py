"""Numerical oracles for barriers, curvature bounds, comparison principles and transforms."""

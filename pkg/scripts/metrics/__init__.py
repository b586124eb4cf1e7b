"""Conformal factors, Gauss curvature, the cutoff and sample initial metrics."""

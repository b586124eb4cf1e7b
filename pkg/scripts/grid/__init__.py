"""Polar discretization of discs: grids, fields, stencils and the snapshot codec."""

"""Numerical laboratory for instantaneously complete Ricci flow on the unit disc."""

"""Time integration of the conformal Ricci flow on a truncated disc."""

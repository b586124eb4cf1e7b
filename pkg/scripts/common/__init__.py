"""Shared errors, configuration, console and file helpers."""

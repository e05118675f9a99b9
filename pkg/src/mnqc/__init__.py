"""Layered performance simulator for two-node quantum computers with microwave-to-optical links."""

__version__ = "0.1.0"

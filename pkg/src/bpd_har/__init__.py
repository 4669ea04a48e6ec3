"""Behaviour pattern disentanglement for wearable activity recognition."""

__version__ = "0.1.0"

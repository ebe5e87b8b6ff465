"""Desk-scale quadruped locomotion RL workbench."""

__version__ = "0.1.0"

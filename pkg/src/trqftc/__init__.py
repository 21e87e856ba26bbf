"""Fault-tolerant predictive control of a tilt-rotor quadcopter in simulation."""

__version__ = "0.1.0"

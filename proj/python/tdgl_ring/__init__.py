"""Stochastic TDGL simulation of a superconducting ring around a solenoid."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_cli  # noqa: F401

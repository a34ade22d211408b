"""Render delay-sweep figures from the experiment harness CSV."""

from .plot import FIGURES, plot

__version__ = "0.1.0"

__all__ = ["FIGURES", "plot"]

"""Numerical toolkit for the mixing/dispersion phase analysis of the
linearized beta-plane equation near Couette flow."""

__version__ = "0.1.0"

"""Rational Betti numbers of the strata Sigma_lambda via marked forests."""

from .version import __version__

__all__ = ["__version__"]

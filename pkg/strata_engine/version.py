"""Version information for Strata Engine."""

__version__ = "1.0.0"

"""Spectral schemes for phase-field and fluid equations with maximum-principle diagnostics."""

__version__ = "0.1.0"

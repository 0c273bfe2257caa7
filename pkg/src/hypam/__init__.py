"""Hyperbolic amoebas of subvarieties of PSL2(C)."""

__version__ = "0.1.0"

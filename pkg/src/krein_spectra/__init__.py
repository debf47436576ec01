"""Strictly positive spectra of higher-order Krein Laplacians via buckling pencils."""

__version__ = "0.1.0"

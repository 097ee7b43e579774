"""Exact operator algebra and numerical spectra for N-fold supersymmetric
quantum mechanics with quadratic and periodic prepotentials."""

__version__ = "0.1.0"

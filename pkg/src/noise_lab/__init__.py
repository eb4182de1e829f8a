"""Noise sensitivity and witness-conditioned noise experiments for Boolean
functions and random graph properties."""
from .core import Configuration, NoiseParams, RandomStream, apply_noise, sample_configuration
from .fourier import BooleanFunction, SpectralTable, TruthTableFunction, transform

__version__ = "0.1.0"

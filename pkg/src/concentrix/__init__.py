"""Concentration-bound evaluators for random matrices, with a Monte Carlo verifier."""

from . import bounds, matcore, mc, mfunc, models, stats
from .rng import RandomStream

__version__ = "0.1.0"

__all__ = ["bounds", "matcore", "mc", "mfunc", "models", "stats", "RandomStream", "__version__"]

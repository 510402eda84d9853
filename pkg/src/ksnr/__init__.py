"""Koopman spectrum regulation toolkit.

Estimates Koopman operators of controlled dynamics from rollouts, scores
them with spectrum costs, optimizes policies by cross-entropy search, and
runs a Thompson-sampling online learner with regret diagnostics.
"""

from ksnr.backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]

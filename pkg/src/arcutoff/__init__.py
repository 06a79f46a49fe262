"""
arcutoff
========

Simulation and analysis toolkit for auto-regressive coordinate-update Markov
chains: the chain itself, its projected walk on the positive unit sphere,
the stationary law via backward iteration, the exact two-dimensional Gaussian
pipeline, and total-variation brackets around the cutoff window.

Layout follows hexagonal architecture (ports and adapters).
"""

__version__ = "0.1.0"

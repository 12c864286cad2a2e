"""Weighted Hardy-Rellich operator calculus.

Exact piecewise radial term algebra, spherical-mode operator calculus,
coefficient recurrences, identity/inequality verification suites on
Euclidean and hyperbolic space, and sharp-constant estimation by
Rayleigh-quotient minimization.
"""

__version__ = "0.1.0"

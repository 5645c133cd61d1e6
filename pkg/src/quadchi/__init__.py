"""quadchi: exact Euler-Poincare characteristics of semi-algebraic sets.

The package computes chi(S) for sets defined by polynomials that are
quadratic in one block of variables (Y) and of bounded degree in another
(X), via a symbolic pipeline whose only geometric subroutine is a
cylindrical algebraic decomposition in the low-dimensional parameter
space, plus an independent brute-force CAD oracle for cross-checking.
"""

from .scalars import QQ, TowerElement, qq, tower_eps, tower_sign

__version__ = "0.1.0"

__all__ = ["QQ", "TowerElement", "qq", "tower_eps", "tower_sign", "__version__"]

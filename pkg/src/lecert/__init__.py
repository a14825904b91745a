"""Exact-arithmetic positivity certification for the Lane-Emden system.

Subpackages:

* ``exactnum``     exact rationals and rational-endpoint interval arithmetic
* ``sympoly``      polynomial / rational-function algebra in Q[n, d1, d2]
* ``coefficients`` construction of all estimate coefficients (two schemes)
* ``certifier``    interval branch-and-bound positivity certificates
* ``asymptotic``   large-n decompositions, residual bounds, tail inequality
* ``radial``       floating-point radial shooting explorer
* ``cli``          command line front end
"""

__version__ = "0.1.0"

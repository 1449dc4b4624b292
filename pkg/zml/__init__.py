"""ZML: Zeta Moments Laboratory.

Desk-scale numerics for twisted exponential moments of the Riemann
zeta-function on the critical line: zero tables, the approximate
formula for log zeta, the optimized constants, the multi-range
partition of [T, 2T], and the random Euler-product model.
"""

__version__ = "0.1.0"

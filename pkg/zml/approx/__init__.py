"""Approximate formula for Re e^{-i theta} log zeta(1/2 + it).

Kernel u and its Mellin transform, the weight w_X, the zero-density
function sigma, the Dirichlet polynomial P, the zero term Y, and the
numerical checks built on them.
"""

SIEVE_LIMIT = 10**9
DEFAULT_TAIL_TOL = 1e-9

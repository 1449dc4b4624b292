"""Moments and tails of Re e^{-i theta} log zeta(1/2 + it).

Quadrature of M_{k,theta}(T) panel by panel between zeros, sampled
survival curves, and evaluation of the upper-bound shapes they are
compared against.
"""

GL_ORDER = 16
MAX_DEPTH = 14
EXP_LIMIT = 700.0
MIN_TAIL_SAMPLES = 10_000

"""The random Euler-product model.

Independent variables X(p), uniform on the unit circle, stand in for
p^{-it}. Expectations of monomials in them are evaluated exactly by
orthogonality; everything else is estimated by Monte Carlo over
counter-based streams keyed by (seed, prime, trial).
"""

MIN_TRIALS = 1000
TRIAL_CHUNK = 1 << 14
EXPANSION_GUARD = 10**7
CIRCLE_POINTS = 256

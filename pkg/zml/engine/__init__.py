"""Zeta evaluation on and near the critical line.

Two independent paths:
1. Fast: Riemann–Siegel Z(t) in binary64 with numpy (``riemann_siegel``)
2. Oracle: Euler–Maclaurin summation in mpmath (``oracle``)

``log_zeta`` combines the fast path with a zero table to give
log zeta(1/2 + it) as (log|Z(t)|, pi S(t)).
"""

VALIDITY_FLOOR = 10.0
PRECISE_BELOW = 200.0

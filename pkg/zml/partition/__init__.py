"""The multi-range partition of [T, 2T].

The delta ladder and the index I, the polynomials G_(i,j), the sets
A(i,j), B(j), T and S(j), their sampled measures, and the mean-value
bound for Dirichlet polynomials.
"""

MIN_PARTITION_SAMPLES = 1000
SAMPLE_CHUNK = 1000

"""Zero tables: scanning, ingestion, persistence and queries.

Provides N(T), N(sigma, T), S(t) support, and synthetic off-line zeros
for exercising code paths that real (beta = 1/2) data never reaches.
"""

CACHE_MAGIC = b"ZMLZ"
CACHE_VERSION = 1
FIRST_ORDINATE_FLOOR = 14.134  # no nontrivial zero lies below 14.1347

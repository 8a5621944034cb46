"""Regenerating codes for distributed storage.

Codecs (Reed-Solomon, product-matrix MSR, exact linear and random linear
regenerating codes) over GF(2^q), an analytical repair-cost model with a
Monte Carlo cross-check, and a benchmark harness.
"""

__version__ = "0.1.0"

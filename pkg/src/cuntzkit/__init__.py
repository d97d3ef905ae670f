"""Exact rational model of the Cuntz-Renault groupoid Hilbert space.

The package computes, over exact rationals, the GNS representation
attached to the canonical KMS state of the Cuntz algebra O_N, the
singular integral operator living on it, and the spectral-triple
diagnostics (heat traces, commutator spectra, modular correlation
functions) that probe whether the construction behaves like a
noncommutative Dirac geometry.  A separate adjudication layer compares
independently printed closed-form expressions against the in-package
oracle and reports machine-readable verdicts with exact witnesses.
"""

__version__ = "0.1.0"

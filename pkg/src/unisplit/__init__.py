"""Reversible (symmetric-conjugate) splitting integrators with complex coefficients.

Library layout:

- :mod:`unisplit.linalg`: dense complex linear algebra (expm, eigensolvers, solves).
- :mod:`unisplit.schemes`: the scheme catalog, expansion and transformation of
  coefficient sequences.
- :mod:`unisplit.propagator`: dense and matrix-free application of a scheme to a
  concrete split H = A + B, plus reversibility/order diagnostics.
- :mod:`unisplit.experiments`: seeded random-matrix classes, unit-modulus sweeps,
  spectral projectors and long-time conservation runs.
- :mod:`unisplit.spectral`: pseudo-spectral 1-D Schroedinger backend with the
  modified Poeschl-Teller potential.
- :mod:`unisplit.cli`: the ``unisplit`` command-line front end.
"""

__version__ = "0.1.0"

from unisplit.schemes import SplittingScheme, catalog, get_scheme  # noqa: F401

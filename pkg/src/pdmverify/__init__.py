"""Exact verification engine for superintegrable position-dependent-mass
quantum systems.

The package builds Hamiltonians H = p_a f(x) p_a + V(x) and their claimed
integrals of motion inside a fixed exact coordinate tower, proves or
refutes commutation [H, Q] = 0 by canonical-form reduction, cross-checks
every verdict with an independent numeric oracle, and ships a catalog of
classified systems together with their verification reports.
"""

__version__ = "0.1.0"

from . import symexpr, grammar, diffop  # noqa: F401  (convenience imports)

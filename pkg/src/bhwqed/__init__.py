"""Quantum emitters coupled to a photonic Bose-Hubbard waveguide.

Closed-form decay rates and gap couplings for the superfluid and Mott
baths, numerical oracles (momentum quadrature and exact diagonalization),
the superradiant burst criterion and emitter-only Lindblad dynamics.
"""
__version__ = "0.1.0"

from .core import (EmitterArray, LatticeParams, MiParams, OutOfBandError, PhysicsError,
                   ReducedUnits, RegimeWarning, SfParams)

__all__ = ["EmitterArray", "LatticeParams", "MiParams", "OutOfBandError", "PhysicsError",
           "ReducedUnits", "RegimeWarning", "SfParams", "__version__"]

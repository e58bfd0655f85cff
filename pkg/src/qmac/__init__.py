"""Exact desk-scale numerics for entanglement-assisted classical communication.

Finite-dimensional codebooks and decoders (sequential, successive,
simultaneous, coherent) over labeled dense operators, plus the closed-form
entanglement-assisted rate region of the beamsplitter bosonic multiple
access channel with an independent symplectic-spectrum oracle.
"""

from . import eacode, gaussian, info, qmat, seqdecode, simuldecode, typicality
from .qmat import (
    DensityOperator,
    DimensionCapError,
    FactorSpace,
    KrausChannel,
    Operator,
    PovmSet,
    PureState,
    named_channel,
)
from .info import RateRegion

__version__ = "0.1.0"

__all__ = [
    "qmat", "info", "typicality", "eacode", "seqdecode", "simuldecode",
    "gaussian",
    "FactorSpace", "Operator", "DensityOperator", "PureState",
    "KrausChannel", "PovmSet", "RateRegion", "DimensionCapError",
    "named_channel",
]

"""Explicit fixed-depth sigmoid networks that approximate smooth functions on cubes.

Blocks (identity, product, ReLU, monomial, indicator) are assembled into a
network per shifted partition whose sum approximates f at rate M^(-2p).
"""

from .assembly import build_theorem1, derive_params
from .corpus import get_function
from .network_core import SigmoidNetwork, evaluate, evaluate_batch, load, save
from .numeric import Precision

__all__ = [
    "Precision", "SigmoidNetwork", "build_theorem1", "derive_params", "evaluate",
    "evaluate_batch", "get_function", "load", "save",
]
__version__ = "0.1.0"

"""tailforge: refined tail exponents for bounded-jump martingales.

Sharpened Azuma-Hoeffding concentration exponents (divergence, parabola,
and higher-moment routes), their information-theoretic applications
(hypothesis-testing error exponents, pairwise error over symmetric DMCs,
OFDM crest-factor and LDPC cycle concentration), and exact small-instance
oracles that certify every bound numerically.

All exponents are in nats; probability-bound helpers clip to [0, 1] only
at the reporting layer.
"""

from .pmf import AlphabetMismatchError, FinitePmf
from .specfun import ConvergenceError
from .bounds import ExponentValue, MartingaleSpec, MomentProfile
from .validate import InfeasibleError

__version__ = "0.1.0"

__all__ = [
    "AlphabetMismatchError",
    "ConvergenceError",
    "ExponentValue",
    "FinitePmf",
    "InfeasibleError",
    "MartingaleSpec",
    "MomentProfile",
    "__version__",
]

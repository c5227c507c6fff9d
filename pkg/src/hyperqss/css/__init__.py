"""Classical secret sharing schemes for the three-edge hypercycle classes."""
from .constructions import build_for_structure, build_scheme
from .scheme import (SchemeDescriptor, ShareBundle, Unauthorized, UnsupportedClass, classical_rate,
                     deal_secret, recover_secret)
from .verify import rank_report, verify_perfect

__all__ = [
    "SchemeDescriptor", "ShareBundle", "Unauthorized", "UnsupportedClass",
    "build_scheme", "build_for_structure", "deal_secret", "recover_secret", "classical_rate",
    "verify_perfect", "rank_report",
]

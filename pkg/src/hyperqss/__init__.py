"""Secret sharing on three-edge hypercycle access structures, classical and quantum."""
from .access import AccessStructure, catalog, classify, parse_structure
from .css import build_scheme, deal_secret, recover_secret, verify_perfect
from .metrics import efficiency_report, idealized_rate, rate_report
from .protocol import EveModel, SessionConfig, run_session

__version__ = "0.1.0"

__all__ = [
    "AccessStructure", "parse_structure", "classify", "catalog",
    "build_scheme", "deal_secret", "recover_secret", "verify_perfect",
    "idealized_rate", "rate_report", "efficiency_report",
    "SessionConfig", "EveModel", "run_session",
]

from .base import (
    Action,
    ActionDecision,
    BackendError,
    CognitionBackend,
    Profile,
    StateSummary,
    parse_action,
    parse_age,
    parse_attitude,
    parse_emotion,
    parse_gender,
    parse_occupation,
)
from .embedding import trigram_embedding
from .http import HttpBackend, HttpConfig
from .rules import RuleBackend, RuleProfile, unit_hash

__all__ = [
    "Action",
    "ActionDecision",
    "BackendError",
    "CognitionBackend",
    "HttpBackend",
    "HttpConfig",
    "Profile",
    "RuleBackend",
    "RuleProfile",
    "StateSummary",
    "parse_action",
    "parse_age",
    "parse_attitude",
    "parse_emotion",
    "parse_gender",
    "parse_occupation",
    "trigram_embedding",
    "unit_hash",
]

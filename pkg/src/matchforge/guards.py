"""Numeric limits for exhaustive enumeration.

Limits are explicit: exceeding one raises :class:`GuardError`, never truncates.
"""
import os

from matchforge.errors import GuardError

MAX_CONTRACTS = 64
TABULATION_LIMIT = 16
DEFAULT_MAX_GROUND = 12
MAX_PROFILES = 10**6
MAX_MATCHINGS = 10**6


def max_ground():
    """Ground-size limit for exhaustive choice checks (env ``MATCHFORGE_MAX_GROUND``)."""
    raw = os.environ.get("MATCHFORGE_MAX_GROUND")
    if raw is None:
        return DEFAULT_MAX_GROUND
    value = int(raw)
    if value <= 0:
        raise ValueError("MATCHFORGE_MAX_GROUND must be positive")
    return min(value, TABULATION_LIMIT)


def require(size, limit, what):
    if size > limit:
        raise GuardError(f"{what}: {size} exceeds guard {limit}")

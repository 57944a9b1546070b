"""Enumeration caps and the refusal exception shared by every module."""

from __future__ import annotations

import os

DEFAULT_CODE_CAP = 10**6
DEFAULT_SVP_RANK_CAP = 16
DEFAULT_POINT_CAP = 10**7
DEFAULT_TAIL_EPS = 1e-10


class CapExceeded(RuntimeError):
    """Raised instead of silently truncating an enumeration.

    ``estimate`` carries whatever count-only answer was available
    (a Gaussian binomial, a point-count bracket, ...).
    """

    def __init__(self, message: str, estimate=None):
        super().__init__(message)
        self.estimate = estimate


def point_cap() -> int:
    env = os.environ.get("HLAWKA_CAP_POINTS")
    if env:
        return int(float(env))
    return DEFAULT_POINT_CAP

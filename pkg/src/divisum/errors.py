"""Shared exception types."""

from __future__ import annotations


class DivisumError(Exception):
    """Base class for package errors."""


class CapacityError(DivisumError):
    """A request exceeds a configured segment size or scan capacity."""


class SummatoryOverflowError(DivisumError, OverflowError):
    """A summatory value would leave the signed 64-bit range."""


class PrecisionError(DivisumError):
    """A requested enclosure radius cannot be met with the configured
    cutoff and correction order."""


class DomainError(DivisumError, ValueError):
    """An argument lies outside a formula's stated validity range."""


class SignatureError(DivisumError, ValueError):
    """Number-field signature data is inconsistent (r1 + 2*r2 != n_K)."""


class IndeterminateFloorError(DivisumError):
    """An enclosure straddles an integer, so its floor is undetermined
    even after maximal precision escalation."""

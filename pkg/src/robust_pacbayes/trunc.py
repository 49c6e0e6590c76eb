"""Soft-truncation influence functions.

Only the piecewise-cubic function of Catoni and Giulini is shipped::

    psi(u) = u - u**3 / 6      for -sqrt(2) <= u <= sqrt(2)
    psi(u) = +2 sqrt(2) / 3    for u > sqrt(2)
    psi(u) = -2 sqrt(2) / 3    for u < -sqrt(2)

It is odd, non-decreasing, bounded by ``2 sqrt(2) / 3`` and satisfies

    -log(1 - u + u**2 / b) <= psi(u) <= log(1 + u + u**2 / b)

with ``b = 2`` for every real ``u``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "SQRT2",
    "PSI_BOUND",
    "TruncationKind",
    "TruncationFn",
    "CATONI_GIULINI",
    "psi",
    "psi_nonpiecewise",
    "check_key_property",
]

SQRT2 = math.sqrt(2.0)
PSI_BOUND = 2.0 * SQRT2 / 3.0

KEY_PROPERTY_ATOL = 1e-12


class TruncationKind(str, enum.Enum):
    CATONI_GIULINI = "CatoniGiulini"


@dataclass(frozen=True)
class TruncationFn:
    """A named truncation function together with its key-property constant ``b``."""

    kind: TruncationKind = TruncationKind.CATONI_GIULINI
    b: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "kind", TruncationKind(self.kind))
        if self.kind is TruncationKind.CATONI_GIULINI and self.b != 2.0:
            raise DomainError("the Catoni-Giulini function satisfies the key property with b = 2")

    @property
    def bound(self) -> float:
        """Supremum of ``|psi|``."""
        return PSI_BOUND

    def __call__(self, u):
        return psi(self, u)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "b": self.b}

    @classmethod
    def from_dict(cls, d: dict) -> "TruncationFn":
        return cls(kind=TruncationKind(d.get("kind", "CatoniGiulini")), b=float(d.get("b", 2.0)))


CATONI_GIULINI = TruncationFn()


def _as_finite(u):
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("psi is only defined for finite inputs")
    return arr


def _scalar_or_array(out, u):
    if np.ndim(u) == 0:
        return float(out)
    return out


def psi(f: TruncationFn, u):
    """Evaluate the truncation function at ``u`` (scalar or array).

    The knots ``u = +-sqrt(2)`` belong to the polynomial branch, which meets
    the constant branches continuously there.
    """
    arr = _as_finite(u)
    # clip first: the cubic is monotone on [-sqrt2, sqrt2] and equals the
    # saturation values at the endpoints
    c = np.clip(arr, -SQRT2, SQRT2)
    # c * c * c rather than c**3: the power routine is not exactly odd
    poly = c - c * c * c / 6.0
    out = np.where(arr > SQRT2, PSI_BOUND, np.where(arr < -SQRT2, -PSI_BOUND, poly))
    return _scalar_or_array(out, u)


def psi_nonpiecewise(f: TruncationFn, u):
    """Indicator form of the same function, used in the bias analysis of the risk bound.

    ``(u - u^3/6)(I{u <= sqrt2} - I{u < -sqrt2}) + (2 sqrt2/3)(1 - I{u <= sqrt2} - I{u < -sqrt2})``
    """
    arr = _as_finite(u)
    upper = (arr <= SQRT2).astype(float)
    lower = (arr < -SQRT2).astype(float)
    # the cubic is zeroed outside the middle branch before it is formed, so
    # huge |u| cannot overflow into inf * 0
    middle = upper - lower
    c = np.where(middle != 0.0, arr, 0.0)
    out = (c - c * c * c / 6.0) * middle + PSI_BOUND * (1.0 - upper - lower)
    return _scalar_or_array(out, u)


def check_key_property(f: TruncationFn, u, atol: float = KEY_PROPERTY_ATOL):
    """Return whether ``-log(1 - u + u^2/b) <= psi(u) <= log(1 + u + u^2/b)`` at ``u``.

    Works elementwise on arrays. With ``b = 2`` both log arguments are
    positive for every real ``u``.
    """
    arr = _as_finite(u)
    b = f.b
    hi_arg = 1.0 + arr + arr**2 / b
    lo_arg = 1.0 - arr + arr**2 / b
    if np.any(hi_arg <= 0) or np.any(lo_arg <= 0):
        raise DomainError("log arguments of the key property must be positive")
    val = np.asarray(psi(f, arr))
    ok = (-np.log(lo_arg) <= val + atol) & (val <= np.log(hi_arg) + atol)
    if np.ndim(u) == 0:
        return bool(ok)
    return ok

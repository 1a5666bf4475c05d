"""Unsigned fixed-point numbers with 64 fractional bits.

The keystream has to be reproducible bit for bit across platforms, so map
iteration runs on integers: a value x in [0, 1) is carried as its first 64
fractional binary digits.  Division rounds to nearest with ties to even.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ContractError, DomainError, ParseError

__all__ = ["FRACTION_BITS", "SCALE", "Fixed64", "rne_div"]

FRACTION_BITS = 64
SCALE = 1 << FRACTION_BITS


@dataclass(frozen=True, order=True)
class Fixed64:
    """A number in [0, 1) stored as 64 fractional binary digits."""

    raw: int

    def __post_init__(self) -> None:
        if not isinstance(self.raw, int) or isinstance(self.raw, bool):
            raise ContractError(f"raw encoding must be an int, got {type(self.raw).__name__}")
        if not 0 <= self.raw < SCALE:
            raise ContractError(f"raw encoding out of 64-bit range: {self.raw}")

    @classmethod
    def from_float(cls, x: float) -> "Fixed64":
        """Truncate the fractional binary expansion of ``x`` toward zero.

        1.0 maps to 0: its fractional digits are all zero.
        """
        if not 0.0 <= float(x) <= 1.0:
            raise DomainError(f"expected a value in [0, 1], got {x!r}")
        if x == 1.0:
            return cls(0)
        return cls(int(x * SCALE))

    @classmethod
    def from_hex(cls, text: str) -> "Fixed64":
        """Parse exactly 16 hex digits as the raw 64-bit encoding."""
        if len(text) != 16:
            raise ParseError(f"expected 16 hex digits, got {len(text)}: {text!r}")
        try:
            return cls(int(text, 16))
        except ValueError:
            raise ParseError(f"not a hex string: {text!r}") from None

    def to_float(self) -> float:
        """Nearest double; values just below 1 round up to 1.0 exactly."""
        return self.raw / SCALE

    def to_hex(self) -> str:
        return f"{self.raw:016x}"

    def __xor__(self, other: "Fixed64") -> "Fixed64":
        if not isinstance(other, Fixed64):
            return NotImplemented
        return Fixed64(self.raw ^ other.raw)

    def __float__(self) -> float:
        return self.to_float()

    def __repr__(self) -> str:
        return f"Fixed64(0x{self.raw:016x})"


def rne_div(numerator: int, denominator: int) -> int:
    """Integer division rounded to nearest, ties to even."""
    if denominator <= 0:
        raise ContractError(f"denominator must be positive, got {denominator}")
    if numerator < 0:
        raise ContractError(f"numerator must be non-negative, got {numerator}")
    q, r = divmod(numerator, denominator)
    r2 = 2 * r
    if r2 > denominator or (r2 == denominator and q & 1):
        q += 1
    return q

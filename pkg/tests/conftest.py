"""Shared reference implementations used as independent oracles.

The naive routines here replay the defining equations literally, with no
shortcuts, so the production code can be checked against them rather than
against itself.
"""

from __future__ import annotations

from fractions import Fraction

from chaosteg.dynamics import BitState

SCALE = 1 << 64
HALF = 1 << 63


def naive_iterate(f, initial: BitState, terms) -> BitState:
    """Literal replay of the definition: cell S^n takes f(x^n) there."""
    cells = list(initial.bits())
    for t in terms:
        image = f(BitState.from_bits(cells))
        cells[t - 1] = image.bit(t)
    return BitState.from_bits(cells)


def rational_rne(num: int, den: int) -> int:
    """Round num/den to the nearest integer, ties to even, via Fractions."""
    q = Fraction(num, den)
    floor = q.numerator // q.denominator
    frac = q - floor
    if frac > Fraction(1, 2):
        return floor + 1
    if frac < Fraction(1, 2):
        return floor
    return floor + (floor & 1)


def rational_plcm_step(x_raw: int, p_raw: int) -> int:
    """One map step on the 2^-64 grid, in rational arithmetic."""
    if x_raw > HALF:
        x_raw = SCALE - x_raw
    if x_raw < p_raw:
        out = rational_rne(x_raw * SCALE, p_raw)
    else:
        out = rational_rne((x_raw - p_raw) * SCALE, HALF - p_raw)
    return 0 if out == SCALE else out


def rational_keystream(key_raw: int, message_raw: int, p_raw: int,
                       burn_in: int, n_cells: int, n_iter: int) -> list[int]:
    """Strategy terms from the rational-arithmetic map pipeline."""
    x = message_raw ^ key_raw
    for _ in range(burn_in):
        x = rational_plcm_step(x, p_raw)
    terms = []
    for _ in range(n_iter):
        terms.append((n_cells * x) // SCALE + 1)
        x = rational_plcm_step(x, p_raw)
    return terms

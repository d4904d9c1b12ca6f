"""Deterministic decimal formatting.

Published ratio figures in the record-gap literature are truncated, not
rounded (693/766 appears as 0.9046, never 0.9047), so every ratio this
package prints is truncated toward zero at a fixed number of decimals.
"""


def ratio_string(numerator, denominator, places=4):
    """num/den truncated toward zero, as a fixed-point decimal string."""
    if denominator <= 0:
        raise ValueError("denominator must be positive")
    scaled = (numerator * 10 ** places) // denominator
    whole, frac = divmod(scaled, 10 ** places)
    return f"{whole}.{frac:0{places}d}"


def ratio_value(numerator, denominator, places=4):
    """Float value of ratio_string (the stored-precision ratio)."""
    return float(ratio_string(numerator, denominator, places))


def decimal_string(x, places=4):
    """Truncate a nonnegative float at `places` decimals, deterministically."""
    s = f"{x:.{places + 6}f}"
    point = s.index(".")
    return s[: point + places + 1]

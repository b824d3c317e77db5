"""Wigner 3j symbols.

Notes:
    All angular momenta are passed as twice their value (1 means 1/2),
    so parity checks stay exact.
    The Racah sum is evaluated with integers and Fractions. Only the final
    square root is done in floating point.
"""
from fractions import Fraction
import functools
import math

from errors import InputError

MAX_TWICE_J = 200


@functools.lru_cache(maxsize=None)
def factorial(n: int) -> int:
    if n < 0:
        raise InputError(f"Negative factorial argument. ({n})")
    if n > MAX_TWICE_J * 2:
        raise InputError(f"Angular momentum is too large. (twice-j sum: {n})")
    return math.factorial(n)


def check_column(twice_j: int, twice_m: int):
    if twice_j < 0:
        raise InputError(f"j must not be negative. (2j={twice_j})")
    if abs(twice_m) > twice_j:
        raise InputError(f"|m| exceeds j. (2j={twice_j}, 2m={twice_m})")
    if (twice_j - twice_m) % 2 != 0:
        raise InputError(f"j and m must have the same parity. (2j={twice_j}, 2m={twice_m})")


def is_triangle(twice_j1: int, twice_j2: int, twice_j3: int) -> bool:
    if (twice_j1 + twice_j2 + twice_j3) % 2 != 0:
        return False
    return abs(twice_j1 - twice_j2) <= twice_j3 <= twice_j1 + twice_j2


def racah_sum(twice_j1, twice_j2, twice_j3, twice_m1, twice_m2) -> Fraction:
    """Signed sum over t of the Racah formula."""
    # Every half-sum below is an integer once the selection rules passed.
    t1 = (twice_j2 - twice_m1 - twice_j3) // 2
    t2 = (twice_j1 + twice_m2 - twice_j3) // 2
    t3 = (twice_j1 + twice_j2 - twice_j3) // 2
    t4 = (twice_j1 - twice_m1) // 2
    t5 = (twice_j2 + twice_m2) // 2

    total = Fraction(0)
    for t in range(max(0, t1, t2), min(t3, t4, t5) + 1):
        denom = (factorial(t) * factorial(t - t1) * factorial(t - t2)
                 * factorial(t3 - t) * factorial(t4 - t) * factorial(t5 - t))
        total += Fraction((-1) ** t, denom)
    return total


def squared_prefactor(twice_j1, twice_j2, twice_j3, twice_m1, twice_m2, twice_m3) -> Fraction:
    """Triangle coefficient times the m-dependent factorials."""
    num = (factorial((twice_j1 + twice_j2 - twice_j3) // 2)
           * factorial((twice_j1 - twice_j2 + twice_j3) // 2)
           * factorial((-twice_j1 + twice_j2 + twice_j3) // 2)
           * factorial((twice_j1 + twice_m1) // 2) * factorial((twice_j1 - twice_m1) // 2)
           * factorial((twice_j2 + twice_m2) // 2) * factorial((twice_j2 - twice_m2) // 2)
           * factorial((twice_j3 + twice_m3) // 2) * factorial((twice_j3 - twice_m3) // 2))
    return Fraction(num, factorial((twice_j1 + twice_j2 + twice_j3) // 2 + 1))


def wigner3j_squared(twice_j1: int, twice_j2: int, twice_j3: int,
                     twice_m1: int, twice_m2: int, twice_m3: int) -> Fraction:
    """Exact square of the 3j symbol."""
    for twice_j, twice_m in ((twice_j1, twice_m1), (twice_j2, twice_m2), (twice_j3, twice_m3)):
        check_column(twice_j, twice_m)
    if twice_m1 + twice_m2 + twice_m3 != 0 or not is_triangle(twice_j1, twice_j2, twice_j3):
        return Fraction(0)
    s = racah_sum(twice_j1, twice_j2, twice_j3, twice_m1, twice_m2)
    return s * s * squared_prefactor(twice_j1, twice_j2, twice_j3, twice_m1, twice_m2, twice_m3)


def wigner3j(twice_j1: int, twice_j2: int, twice_j3: int,
             twice_m1: int, twice_m2: int, twice_m3: int) -> float:
    R"""Compute the Wigner 3j symbol:

     / j1 j2 j3 \
     |          |
     \ m1 m2 m3 /

    Returns exactly 0.0 when the selection rules fail.
    """
    for twice_j, twice_m in ((twice_j1, twice_m1), (twice_j2, twice_m2), (twice_j3, twice_m3)):
        check_column(twice_j, twice_m)
    if twice_m1 + twice_m2 + twice_m3 != 0 or not is_triangle(twice_j1, twice_j2, twice_j3):
        return 0.0

    s = racah_sum(twice_j1, twice_j2, twice_j3, twice_m1, twice_m2)
    if s == 0:
        return 0.0
    pref = squared_prefactor(twice_j1, twice_j2, twice_j3, twice_m1, twice_m2, twice_m3)

    # (-1)^(j1 - j2 - m3)
    phase = -1 if ((twice_j1 - twice_j2 - twice_m3) // 2) % 2 else 1
    # sqrt(pref) * s, with the rational part kept exact as long as possible
    return phase * math.copysign(math.sqrt(s * s * pref), s)

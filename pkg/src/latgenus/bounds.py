"""Mass lower bounds with directed-rounding interval arithmetic.

All enumeration-gating comparisons are decided with rational interval
enclosures of pi, zeta values and square roots; precision escalates until the
comparison is unambiguous, so no candidate genus is ever pruned wrongly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from math import isqrt

from sympy import isprime, nextprime

from .massformula import Radical, local_factor_for_part, standard_mass, zeta_even_over_pi
from .symbol import Constituent, enumerate_squarefree_local


@dataclass(frozen=True)
class RInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @staticmethod
    def exact(x) -> "RInterval":
        f = Fraction(x)
        return RInterval(f, f)

    def __add__(self, other):
        other = _coerce(other)
        return RInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __mul__(self, other):
        other = _coerce(other)
        vals = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return RInterval(min(vals), max(vals))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        vals = [self.lo / other.lo, self.lo / other.hi, self.hi / other.lo, self.hi / other.hi]
        return RInterval(min(vals), max(vals))

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def power(self, k: int) -> "RInterval":
        out = RInterval.exact(1)
        for _ in range(k):
            out = out * self
        return out

    def surely_le(self, bound) -> bool | None:
        """True/False if decidable at this precision, None otherwise."""
        bound = Fraction(bound)
        if self.hi <= bound:
            return True
        if self.lo > bound:
            return False
        return None

    def surely_lt(self, bound) -> bool | None:
        bound = Fraction(bound)
        if self.hi < bound:
            return True
        if self.lo >= bound:
            return False
        return None


def _coerce(x) -> RInterval:
    if isinstance(x, RInterval):
        return x
    return RInterval.exact(x)


class PrecisionError(Exception):
    """Raised when a comparison is undecidable at the current precision."""


def decide(make_interval, predicate):
    """Evaluate predicate(interval) at escalating precision until decided."""
    for prec in range(4, 13):
        res = predicate(make_interval(prec))
        if res is not None:
            return res
    raise PrecisionError("comparison undecidable at maximal precision")


def _bits(prec: int) -> int:
    return 64 + 24 * prec


@cache
def _atan_inv_scaled(x: int, terms: int, bits: int) -> tuple[int, int]:
    """Dyadic enclosure of atan(1/x): (lo, hi) scaled by 2^bits."""
    scale = 1 << bits
    lo = hi = 0
    sign = 1
    for k in range(terms):
        den = (2 * k + 1) * x ** (2 * k + 1)
        lo += sign * (-(-scale // den) if sign < 0 else scale // den)
        hi += sign * (scale // den if sign < 0 else -(-scale // den))
        sign = -sign
    err = -(-scale // ((2 * terms + 1) * x ** (2 * terms + 1)))
    return lo - err, hi + err


@cache
def pi_interval(prec: int) -> RInterval:
    bits = _bits(prec)
    terms = 6 + 2 * prec
    a_lo, a_hi = _atan_inv_scaled(5, terms, bits)
    b_lo, b_hi = _atan_inv_scaled(239, terms, bits)
    scale = 1 << bits
    return RInterval(Fraction(16 * a_lo - 4 * b_hi, scale), Fraction(16 * a_hi - 4 * b_lo, scale))


@cache
def zeta_interval(s: int, prec: int) -> RInterval:
    """Enclosure of zeta(s) for integer s >= 2 via dyadic partial sums."""
    bits = _bits(prec)
    scale = 1 << bits
    N = 2 ** (3 + prec)
    lo = hi = 0
    for n in range(1, N):
        d = n**s
        lo += scale // d
        hi += -(-scale // d)
    hi += -(-scale // N**s) + -(-scale // ((s - 1) * N ** (s - 1)))
    return RInterval(Fraction(lo, scale), Fraction(hi, scale))


@cache
def sqrt_interval(m: int, prec: int) -> RInterval:
    scale = 2 ** (8 + 4 * prec)
    lo = isqrt(m * scale * scale)
    return RInterval(Fraction(lo, scale), Fraction(lo + 1, scale))


# ---------------------------------------------------------------------------
# the dimension bounds


def s_lower(n: int, prec: int = 6) -> RInterval:
    """Lower bound for the standard mass, independent of the determinant."""
    if n % 2:
        return RInterval.exact(standard_mass(n, 1).as_fraction())
    s = n // 2
    from .massformula import gamma_half, _factorial

    coeff = Fraction(2)
    pi_half = -n * (n + 1) // 2
    for j in range(1, n + 1):
        c, h = gamma_half(j)
        coeff *= c
        pi_half += h
    for j in range(1, s + 1):
        coeff *= zeta_even_over_pi(2 * j)
        pi_half += 4 * j
    # divide by zeta(s)
    if s % 2 == 0:
        coeff /= zeta_even_over_pi(s)
        pi_half -= 2 * s
        assert pi_half == 0
        return RInterval.exact(coeff)
    assert pi_half == 2 * s
    return coeff * pi_interval(prec).power(s) / zeta_interval(s, prec)


def _zeta_ratio(n: int, prec: int) -> RInterval:
    """zeta(2s)/zeta(s)^2 for even n = 2s (1 for odd n)."""
    if n % 2:
        return RInterval.exact(1)
    s = n // 2
    if s % 2 == 0:
        val = zeta_even_over_pi(2 * s) / zeta_even_over_pi(s) ** 2
        return RInterval.exact(val)
    z = zeta_interval(s, prec)
    return zeta_even_over_pi(2 * s) * pi_interval(prec).power(2 * s) / (z * z)


def a_bound(n: int, p: int, prec: int = 6) -> RInterval:
    """Factor by which the mass grows when a trivial p-part turns nontrivial
    square-free; includes the conservative 1/2 for both parities."""
    s = (n + 1) // 2
    base = Fraction(1, 2) * Fraction(p, p + 1) ** 2 * (1 - Fraction(1, p * p)) ** (s - 1)
    root = sqrt_interval(p, prec).power(n - 1)
    return base * root * _zeta_ratio(n, prec)


def b_bound(n: int, p: int, prec: int = 6) -> RInterval:
    """Mass growth bound for a p^2-determinant jump (length-3 pre-images)."""
    s = (n + 1) // 2
    base = Fraction(1, 2) * Fraction(p, p + 1) ** 2 * (1 - Fraction(1, p * p)) ** (s - 1)
    return base * Fraction(p) ** (n - 1) * _zeta_ratio(n, prec)


@cache
def t_min(n: int) -> Fraction:
    """Minimal 2-adic local factor over primitive square-free 2-parts."""
    best = None
    best_sq = None  # compare values of the form c*sqrt(2) exactly by squaring
    for cs in enumerate_squarefree_local(2, n):
        val = local_factor_for_part(2, cs, n)
        key = (val.coeff**2 * val.rad, val.rad)
        if best is None or key[0] < best_sq[0]:
            best = val
            best_sq = key
    if best.rad != 1:
        raise AssertionError("minimal 2-adic factor is irrational")
    return best.coeff


@cache
def B_set(n: int) -> tuple[int, ...]:
    """Odd primes whose square-free factor bound lies below 1."""
    out = []
    p = 3
    while True:
        if decide(lambda k: a_bound(n, p, k), lambda iv: iv.surely_lt(1)):
            out.append(p)
            p = int(nextprime(p))
        else:
            return tuple(out)


@cache
def maxprime(n: int) -> int:
    """Largest prime that can divide the determinant of a square-free genus
    satisfying the mass condition."""
    base_primes = B_set(n)

    def base(prec):
        prod = s_lower(n, prec) * t_min(n)
        for q in base_primes:
            prod = prod * a_bound(n, q, prec)
        return prod

    # a_bound is increasing in p, so scan until the first failure
    p = 2
    last_ok = None
    while True:
        p = int(nextprime(p))
        ok = decide(lambda k: base(k) * a_bound(n, p, k), lambda iv: iv.surely_le(Fraction(1, 2)))
        if not ok:
            if last_ok is None:
                raise AssertionError("no admissible prime found")
            return last_ok
        last_ok = p


_PAD = 1 - 1e-9


@cache
def s_lower_float(n: int) -> float:
    iv = s_lower(n, 6)
    return float(iv.lo) * _PAD


@cache
def a_bound_float(n: int, p: int) -> float:
    iv = a_bound(n, p, 6)
    return float(iv.lo) * _PAD


@cache
def radical_float_low(coeff_num: int, coeff_den: int, rad: int) -> float:
    from math import sqrt

    return coeff_num / coeff_den * sqrt(rad) * _PAD


def local_factor_float_low(p: int, cs, n: int) -> float:
    val = local_factor_for_part(p, cs, n)
    return radical_float_low(val.coeff.numerator, val.coeff.denominator, val.rad)


def minimal_mass_float_low(prefix_low: float, n: int, q: int) -> float:
    """Sound float lower bound: prefix_low * a_bound(n, q), rounded down."""
    return prefix_low * a_bound_float(n, q) * _PAD


def minimal_mass(two_part: tuple[Constituent, ...],
                 odd_parts: tuple[tuple[int, tuple[Constituent, ...]], ...],
                 q: int, n: int, prec: int = 6) -> RInterval:
    """Lower bound for the mass of any genus with the given 2-adic and odd
    local data plus an unspecified nontrivial square-free q-part.

    Increasing in q for fixed local data.
    """
    total = s_lower(n, prec)
    val = local_factor_for_part(2, two_part, n)
    for p, cs in odd_parts:
        val = val * local_factor_for_part(p, cs, n)
    if val.rad != 1:
        sq = sqrt_interval(val.rad, prec)
        total = total * (val.coeff * sq)
    else:
        total = total * val.coeff
    return total * a_bound(n, q, prec)


def mass_condition_possible(lower: RInterval) -> bool:
    """Whether a genus with this mass lower bound could still have mass <= 1/2.
    Undecided comparisons keep the candidate (the sound direction)."""
    return lower.lo <= Fraction(1, 2)

"""Exact rational evaluation of the mass of a genus from its symbol.

Everything is computed in closed form: zeta values at even integers via
Bernoulli numbers, the quadratic L-value via generalized Bernoulli numbers,
and local factors from the per-constituent diagonal/cross/type data.  All pi
powers and square roots cancel by construction; the result is a Fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache, lru_cache
from math import gcd, prod

from sympy import Rational, bernoulli, factorint
from .symbol import Constituent, GenusSymbol, is_valid_genus_symbol


@dataclass(frozen=True)
class Radical:
    """coeff * sqrt(rad) with rad a positive squarefree integer."""

    coeff: Fraction
    rad: int = 1

    def __mul__(self, other):
        if isinstance(other, Radical):
            g = gcd(self.rad, other.rad)
            return Radical(self.coeff * other.coeff * g, (self.rad // g) * (other.rad // g))
        return Radical(self.coeff * other, self.rad)

    __rmul__ = __mul__

    def as_fraction(self) -> Fraction:
        if self.rad != 1:
            raise ValueError(f"irrational value: sqrt({self.rad}) remains")
        return self.coeff


def _sqrt_power(p: int, e: int) -> Radical:
    """p^(e/2) as a Radical."""
    return Radical(Fraction(p) ** (e // 2), p if e % 2 else 1)


def _jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1."""
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, m: int) -> int:
    """Kronecker symbol (a/m) for m >= 1."""
    if m == 0:
        return 1 if a in (1, -1) else 0
    res = 1
    while m % 2 == 0:
        m //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            res = -res
    if m == 1:
        return res
    if gcd(a, m) != 1:
        return 0
    return res * _jacobi(a, m)


@cache
def zeta_even_over_pi(k: int) -> Fraction:
    """zeta(k) / pi^k for even k >= 2."""
    assert k >= 2 and k % 2 == 0
    m = k // 2
    b = Fraction(*Rational(bernoulli(k)).as_numer_denom())
    return (-1) ** (m + 1) * b * Fraction(2) ** (k - 1) / Fraction(_factorial(k))


@cache
def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def gamma_half(j: int) -> tuple[Fraction, int]:
    """Gamma(j/2) = c * pi^(h/2); returns (c, h)."""
    if j % 2 == 0:
        return Fraction(_factorial(j // 2 - 1)), 0
    # Gamma(k + 1/2) = (2k)! / (4^k k!) sqrt(pi)
    k = (j - 1) // 2
    return Fraction(_factorial(2 * k), 4**k * _factorial(k)), 1


@cache
def fundamental_discriminant(D_num: int, D_den: int = 1) -> int:
    """Discriminant of Q(sqrt(D)); 1 if D is a square."""
    D = Fraction(D_num, D_den)
    sq = 1
    for p, e in factorint(abs(D.numerator) * D.denominator).items():
        if e % 2:
            sq *= p
    d = sq if D > 0 else -sq
    if d % 4 == 1:
        return d
    return 4 * d


@cache
def _bernoulli_number(j: int) -> Fraction:
    if j == 1:
        return Fraction(-1, 2)  # the minus convention that matches B_k(x)
    return Fraction(*Rational(bernoulli(j)).as_numer_denom())


@cache
def _binomial(k: int, j: int) -> int:
    out = 1
    for i in range(j):
        out = out * (k - i) // (i + 1)
    return out


@cache
def generalized_bernoulli(k: int, D0: int) -> Fraction:
    """k-th Bernoulli number attached to the quadratic character of D0.

    Uses B_{k,chi} = sum_j C(k,j) B_j f^{j-1} S_{k-j} with the twisted power
    sums S_m = sum_a chi(a) a^m, keeping everything in integer arithmetic.
    """
    f = abs(D0) if D0 != 1 else 1
    S = [0] * (k + 1)
    for a in range(1, f + 1):
        chi = kronecker(D0, a)
        if chi:
            pw = 1
            for m in range(k + 1):
                S[m] += chi * pw
                pw *= a
    total = Fraction(0)
    for j in range(k + 1):
        total += _binomial(k, j) * _bernoulli_number(j) * Fraction(f) ** (j - 1) * S[k - j]
    return total


def quadratic_L_value(s: int, D0: int) -> tuple[Fraction, int]:
    """L(s, chi_D0) = c * pi^s * sqrt(f) with f = |D0|; returns (c, f).

    Valid when chi(-1) = (-1)^s, which the mass formula guarantees.
    """
    f = abs(D0)
    c = Fraction((-1) ** (s // 2 + 1) * 2 ** (s - 1), _factorial(s))
    b = generalized_bernoulli(s, D0)
    return c * b / Fraction(f) ** s, f


@cache
def standard_mass(n: int, det: int) -> Radical:
    """Mass of a genus with trivial local data, dimension n, determinant det.

    For odd n the value does not depend on det.  The result may contain a
    residual square root that cancels against the local factors.
    """
    if n <= 2:
        raise ValueError("standard mass requires dimension >= 3")
    s = (n + 1) // 2
    coeff = Fraction(2)
    pi_half = -n * (n + 1) // 2  # exponent of pi in halves
    rad = Radical(Fraction(1))
    for j in range(1, n + 1):
        c, h = gamma_half(j)
        coeff *= c
        pi_half += h
    for i in range(1, s):
        coeff *= zeta_even_over_pi(2 * i)
        pi_half += 4 * i
    if n % 2 == 0:
        D = (-1) ** s * det
        D0 = fundamental_discriminant(D)
        Lc, f = quadratic_L_value(s, D0)
        # zeta_D(s): remove the Euler factor at 2 and at odd primes dividing det
        Lc *= 1 - Fraction(kronecker(D0, 2), 2**s)
        for p in factorint(det):
            if p != 2:
                Lc *= 1 - Fraction(kronecker(D0, p), p**s)
        coeff *= Lc
        pi_half += 2 * s
        rad = rad * Radical(Fraction(1), _squarefree(f))
        coeff *= _square_part_root(f)
    if pi_half != 0:
        raise AssertionError("pi powers did not cancel")
    return rad * coeff


def _squarefree(m: int) -> int:
    out = 1
    for p, e in factorint(m).items():
        if e % 2:
            out *= p
    return out


def _square_part_root(m: int) -> Fraction:
    out = 1
    for p, e in factorint(m).items():
        out *= p ** (e // 2)
    return Fraction(out)


# ---------------------------------------------------------------------------
# local factors


def _diag_factor(species: int, p: int) -> Fraction:
    if species == 0:
        return Fraction(1)
    if species % 2:
        s = (abs(species) - 1) // 2
        out = Fraction(1, 2)
        for i in range(1, s + 1):
            out /= 1 - Fraction(1, p ** (2 * i))
        return out
    s = abs(species) // 2
    sign = 1 if species > 0 else -1
    out = Fraction(1, 2) / (1 - sign * Fraction(1, p**s))
    for i in range(1, s):
        out /= 1 - Fraction(1, p ** (2 * i))
    return out


def _cross_exponent(cs) -> int:
    e = 0
    for i, a in enumerate(cs):
        for b in cs[i + 1 :]:
            e += (b.scale - a.scale) * a.rank * b.rank
    return e


def species_at_odd(c: Constituent, p: int) -> int:
    if c.rank % 2:
        return c.rank
    si = c.rank // 2
    sign = c.det_class * (_jacobi(-1, p) ** si)
    return sign * c.rank


def p_mass_odd(cs, p: int) -> Radical:
    m = Radical(Fraction(1))
    for c in cs:
        m = m * _diag_factor(species_at_odd(c, p), p)
    return m * _sqrt_power(p, _cross_exponent(cs))


def species_at_2(cs) -> list[int]:
    """Species of every constituent in the scale range [min-1, max+1]."""
    by_scale = {c.scale: c for c in cs}
    lo = min(by_scale) - 1
    hi = max(by_scale) + 1
    out = []
    for scale in range(lo, hi + 1):
        c = by_scale.get(scale)
        lower = by_scale.get(scale - 1)
        upper = by_scale.get(scale + 1)
        bound = (lower is not None and lower.odd) or (upper is not None and upper.odd)
        if c is None:
            out.append(1 if bound else 0)
            continue
        r = c.rank
        if bound:
            if not c.odd:
                out.append(r + 1)
            else:
                out.append(r if r % 2 else r - 1)
            continue
        if not c.odd:
            out.append(c.eps * r)
            continue
        t = c.oddity % 8
        d = c.det_class % 8
        if r % 2:
            if r == 1:
                out.append(0)
                continue
            sign = 1 if d * t % 8 == (-1) ** ((r - 1) // 2) % 8 else -1
            out.append(sign * (r - 1))
        elif t in (2, 6):
            out.append(r - 1)
        elif r == 2:
            out.append(0)
        elif t == 0:
            out.append(c.eps * (r - 2))
        else:  # t == 4
            out.append(-c.eps * (r - 2))
    return out


def p_mass_2(cs) -> Radical:
    m = Radical(Fraction(1))
    for sp in species_at_2(cs):
        m = m * _diag_factor(sp, 2)
    m = m * _sqrt_power(2, _cross_exponent(cs))
    # type factor
    n_II = sum(c.rank for c in cs if not c.odd)
    by_scale = {c.scale: c for c in cs}
    n_II_pairs = sum(
        1
        for c in cs
        if c.odd and (nb := by_scale.get(c.scale + 1)) is not None and nb.odd
    )
    return m * Fraction(2) ** (n_II_pairs - n_II)


@lru_cache(maxsize=100000)
def local_factor_for_part(p: int, cs, n: int) -> Radical:
    """m_p / std_p for an explicit local constituent list of a rank-n genus."""
    s = (n + 1) // 2
    if p == 2:
        m = p_mass_2(cs)
    else:
        m = p_mass_odd(cs, p)
    std_inv = Fraction(2)
    for j in range(2, s + 1):
        std_inv *= 1 - Fraction(1, p ** (2 * j - 2))
    return m * std_inv


def local_factor(sym: GenusSymbol, p: int) -> Radical:
    """m_p(L) / std_p(L): the deviation of the p-adic density from the
    standard one; equals 1 for primes not dividing 2*det."""
    cs = sym.part(p)
    if p == 2 and not cs:
        cs = (Constituent(0, sym.n, sym.det % 8, True, sym.n % 8),)
    return local_factor_for_part(p, cs, sym.n)


def mass(sym: GenusSymbol) -> Fraction:
    """Exact mass of the genus."""
    key = None
    try:
        key = hash(sym)
    except TypeError:
        pass
    if key is not None and key in _MASS_CACHE:
        return _MASS_CACHE[key]
    if not is_valid_genus_symbol(sym):
        raise ValueError("invalid genus symbol")
    det = sym.det
    total = standard_mass(sym.n, det)
    for p in sorted({2} | set(factorint(det))):
        total = total * local_factor(sym, p)
    result = total.as_fraction()
    if key is not None:
        _MASS_CACHE[key] = result
    return result


_MASS_CACHE: dict = {}


def mass_condition(sym: GenusSymbol) -> bool:
    """mass <= 1/2 and 1/mass an even integer."""
    m = mass(sym)
    if m > Fraction(1, 2):
        return False
    inv = 1 / m
    return inv.denominator == 1 and inv.numerator % 2 == 0

"""Integer arithmetic helpers: primality, factoring, residue symbols.

Deterministic Miller-Rabin is exact for every input below 3.3 * 10^24,
far beyond anything this package handles; Pollard rho covers composite
splitting for the occasional large user-supplied rational.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    for c in range(1, 50):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"failed to split {n}")  # astronomically unlikely


def factorint(n: int) -> dict[int, int]:
    """Prime factorization of ``|n|`` as ``{prime: exponent}``; 0 and units -> {}."""
    n = abs(n)
    out: dict[int, int] = {}
    if n <= 1:
        return out
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return out


def valuation(q: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if not q:
        raise ZeroDivisionError("valuation of zero is undefined")
    v = 0
    n = q.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = q.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part_mod(q: Fraction, p: int, modulus: int) -> int:
    """The p-unit part of ``q`` reduced mod ``modulus`` (a power of p times nothing else).

    Requires ``modulus`` coprime to the reduced numerator and denominator,
    which holds after dividing out p^v.
    """
    v = valuation(q, p)
    u = q / Fraction(p) ** v
    num = u.numerator % modulus
    den = u.denominator % modulus
    return num * pow(den, -1, modulus) % modulus


def legendre(q: Fraction, p: int) -> int:
    """Legendre symbol of a p-adic unit rational modulo an odd prime."""
    a = unit_part_mod(q, p, p) if valuation(q, p) == 0 else None
    if a is None:
        raise ValueError(f"{q} is not a unit at {p}")
    s = pow(a, (p - 1) // 2, p)
    return -1 if s == p - 1 else 1

from functools import lru_cache
from math import gcd, prod
from typing import Dict, List, Optional

from trig_inverse.model import CanonicalResidue, RepresentativeSet


class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""
    pass


def _require_positive(n: int) -> None:
    if n < 1:
        raise DomainError(f"expected a positive integer, got {n}")


def _require_coprime(k: int, n: int) -> None:
    if gcd(k, n) != 1:
        raise DomainError(f"{k} is not coprime to {n}")


@lru_cache(maxsize=4096)
def _factorize(n: int) -> tuple:
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            factors.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append((n, 1))
    return tuple(factors)


def factorize(n: int) -> Dict[int, int]:
    """
    Prime factorization by trial division.

    Args:
        n: Positive integer

    Returns:
        Mapping prime -> exponent, primes ascending (empty for n = 1)
    """
    _require_positive(n)
    return dict(_factorize(n))


def euler_phi(n: int) -> int:
    _require_positive(n)
    return prod((p - 1) * p ** (e - 1) for p, e in _factorize(n))


def moebius(n: int) -> int:
    _require_positive(n)
    factors = _factorize(n)
    if any(e > 1 for _, e in factors):
        return 0
    return -1 if len(factors) % 2 else 1


def is_squarefree(n: int) -> bool:
    return moebius(n) != 0


def square_divisor(n: int) -> Optional[int]:
    """Smallest prime p with p² | n, or None if n is square-free."""
    _require_positive(n)
    for p, e in _factorize(n):
        if e > 1:
            return p
    return None


@lru_cache(maxsize=4096)
def _divisors(n: int) -> tuple:
    divs = [1]
    for p, e in _factorize(n):
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return tuple(sorted(divs))


def divisors(n: int) -> List[int]:
    _require_positive(n)
    return list(_divisors(n))


def mod_inverse(k: int, n: int) -> int:
    """
    Inverse k* of k mod n.

    Args:
        k: Integer coprime to n
        n: Modulus, n >= 2

    Returns:
        k* in [1, n - 1] with k * k* = 1 mod n
    """
    if n < 2:
        raise DomainError(f"modulus must be at least 2, got {n}")
    _require_coprime(k, n)
    return pow(k, -1, n)


@lru_cache(maxsize=1024)
def representative_set(n: int) -> RepresentativeSet:
    """
    Canonical system of representatives of (Z/nZ)^x / {±1}.

    Args:
        n: Modulus, n >= 3

    Returns:
        {l : 1 <= l <= n/2, gcd(l, n) = 1} in ascending order
    """
    if n < 3:
        raise DomainError(f"n must be at least 3, got {n}")
    members = tuple(l for l in range(1, n // 2 + 1) if gcd(l, n) == 1)
    return RepresentativeSet(modulus=n, members=members)


def canonical_residue(x: int, R: RepresentativeSet) -> CanonicalResidue:
    """Write the unit x as sign * l mod n with l in R."""
    n = R.modulus
    _require_coprime(x, n)
    r = x % n
    if r in R:
        return CanonicalResidue(sign=1, representative=r)
    # r > n/2 here, so n - r is the representative
    return CanonicalResidue(sign=-1, representative=n - r)


def lambda_count(k: int, n: int) -> int:
    """
    Number of divisors q >= 3 of n with k = 1 mod q.

    Args:
        k: Integer coprime to n
        n: Modulus

    Returns:
        The count; k outside the units of n is a DomainError, not 0
    """
    _require_positive(n)
    _require_coprime(k, n)
    return sum(1 for q in _divisors(n) if q >= 3 and (k - 1) % q == 0)

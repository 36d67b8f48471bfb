import cmath
import logging
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import gcd, lcm
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sympy import Poly, cyclotomic_poly, symbols

from trig_inverse.model import Parity
from trig_inverse.ntheory import DomainError, divisors, euler_phi, factorize

logger = logging.getLogger("characters")


class UnitComponent(BaseModel):
    """Cyclic factors of (Z/p^e)^x with a complete discrete log table."""
    prime: int
    exponent: int
    modulus: int = Field(description="p^e")
    generators: Tuple[int, ...] = Field(description="Generators as residues mod p^e")
    orders: Tuple[int, ...]
    dlog: Dict[int, Tuple[int, ...]] = Field(description="Residue mod p^e -> exponent vector")

    model_config = ConfigDict(frozen=True)


def _primitive_root(p: int, pe: int) -> int:
    """Smallest primitive root mod the odd prime power pe."""
    phi = euler_phi(pe)
    prime_factors = list(factorize(phi))
    for g in range(2, pe):
        if g % p == 0:
            continue
        if all(pow(g, phi // q, pe) != 1 for q in prime_factors):
            return g
    raise ArithmeticError(f"no primitive root mod {pe}")


def _component(p: int, e: int) -> UnitComponent:
    pe = p ** e
    if p == 2 and e == 1:
        generators, orders = (), ()
        dlog = {1: ()}
    elif p == 2 and e == 2:
        generators, orders = (3,), (2,)
        dlog = {1: (0,), 3: (1,)}
    elif p == 2:
        # (Z/2^e)^x = <-1> x <5>
        generators, orders = (pe - 1, 5), (2, pe // 4)
        dlog = {}
        for a in range(2):
            for b in range(pe // 4):
                dlog[(-1) ** a * pow(5, b, pe) % pe] = (a, b)
    else:
        g = _primitive_root(p, pe)
        phi = euler_phi(pe)
        generators, orders = (g,), (phi,)
        dlog = {pow(g, t, pe): (t,) for t in range(phi)}
    return UnitComponent(prime=p, exponent=e, modulus=pe, generators=generators, orders=orders, dlog=dlog)


class UnitGroupBasis(BaseModel):
    """CRT decomposition of (Z/nZ)^x into cyclic factors with fixed generators."""
    modulus: int = Field(ge=1)
    components: Tuple[UnitComponent, ...]

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def orders(self) -> Tuple[int, ...]:
        return tuple(o for c in self.components for o in c.orders)

    @property
    def exponent(self) -> int:
        """Exponent of the group: every character value is an E-th root of unity."""
        return lcm(*self.orders) if self.orders else 1

    @cached_property
    def lifted_generators(self) -> Tuple[int, ...]:
        """Generators as residues mod n: g mod its own prime power, 1 mod the others."""
        n = self.modulus
        lifted = []
        for c in self.components:
            rest = n // c.modulus
            for g in c.generators:
                x = g * rest * pow(rest, -1, c.modulus) + c.modulus * pow(c.modulus, -1, rest)
                lifted.append(x % n)
        return tuple(lifted)

    @cached_property
    def units(self) -> Tuple[int, ...]:
        """Residues 1 <= k <= n coprime to n."""
        return tuple(k for k in range(1, self.modulus + 1) if gcd(k, self.modulus) == 1)

    def dlog(self, k: int) -> Tuple[int, ...]:
        if gcd(k, self.modulus) != 1:
            raise DomainError(f"{k} is not a unit mod {self.modulus}")
        return tuple(x for c in self.components for x in c.dlog[k % c.modulus])

    @cached_property
    def dlog_matrix(self) -> np.ndarray:
        """Row per unit (in `units` order), column per cyclic factor."""
        out = np.array([self.dlog(k) for k in self.units], dtype=np.int64)
        return out.reshape(len(self.units), len(self.orders))


@lru_cache(maxsize=512)
def _basis(n: int) -> UnitGroupBasis:
    # Moduli 1 and 2 are allowed here for primitive parts and induced characters
    components = tuple(_component(p, e) for p, e in factorize(n).items())
    basis = UnitGroupBasis(modulus=n, components=components)
    logger.debug(f"Unit group mod {n}: orders {basis.orders}, generators {basis.lifted_generators}")
    return basis


def unit_group_basis(n: int) -> UnitGroupBasis:
    """
    Basis of (Z/nZ)^x.

    Odd prime powers use their smallest primitive root. 4 uses 3. 2^e with e >= 3 uses
    (2^e - 1, 5) with orders (2, 2^(e-2)). The factor for 2 is trivial.

    Args:
        n: Modulus, n >= 3

    Returns:
        The cached, immutable basis
    """
    if n < 3:
        raise DomainError(f"n must be at least 3, got {n}")
    return _basis(n)


class CharacterValue(BaseModel):
    """The root of unity e^(2πi a/m) in lowest terms, or zero off the units."""
    numerator: int = 0
    order: int = Field(1, ge=1)
    zero: bool = False

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_range(self) -> "CharacterValue":
        if not 0 <= self.numerator < self.order:
            raise ValueError(f"numerator must lie in [0, {self.order})")
        return self

    @classmethod
    def from_angle(cls, angle: Optional[Fraction]) -> "CharacterValue":
        if angle is None:
            return cls(zero=True)
        angle = angle % 1
        return cls(numerator=angle.numerator, order=angle.denominator)

    @property
    def angle(self) -> Optional[Fraction]:
        return None if self.zero else Fraction(self.numerator, self.order)

    def to_complex(self) -> complex:
        if self.zero:
            return 0j
        quarter = {(0, 1): 1 + 0j, (1, 4): 1j, (1, 2): -1 + 0j, (3, 4): -1j}
        exact = quarter.get((self.numerator, self.order))
        if exact is not None:
            return exact
        return cmath.exp(2j * cmath.pi * self.numerator / self.order)

    def __mul__(self, other: "CharacterValue") -> "CharacterValue":
        if self.zero or other.zero:
            return CharacterValue(zero=True)
        return CharacterValue.from_angle(self.angle + other.angle)

    def conjugate(self) -> "CharacterValue":
        return self if self.zero else CharacterValue.from_angle(-self.angle)


class DirichletCharacter(BaseModel):
    """Character mod n given by its exponent vector on the fixed generators."""
    modulus: int = Field(ge=1)
    exponents: Tuple[int, ...]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_exponents(self) -> "DirichletCharacter":
        orders = _basis(self.modulus).orders
        if len(self.exponents) != len(orders):
            raise ValueError(f"expected {len(orders)} exponents mod {self.modulus}, got {len(self.exponents)}")
        for e, o in zip(self.exponents, orders):
            if not 0 <= e < o:
                raise ValueError(f"exponent {e} out of range for a factor of order {o}")
        return self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return (self.modulus, self.exponents) == (other.modulus, other.exponents)

    def __hash__(self) -> int:
        return hash((self.modulus, self.exponents))

    @property
    def basis(self) -> UnitGroupBasis:
        return _basis(self.modulus)

    def angle(self, k: int) -> Optional[Fraction]:
        """χ(k) = e(angle); None when gcd(k, n) > 1."""
        if gcd(k, self.modulus) != 1:
            return None
        dlog = self.basis.dlog(k)
        return sum((Fraction(e * d, o) for e, d, o in zip(self.exponents, dlog, self.basis.orders)), Fraction(0)) % 1

    def __call__(self, k: int) -> CharacterValue:
        return CharacterValue.from_angle(self.angle(k))

    @cached_property
    def angle_vector(self) -> np.ndarray:
        """Values on `basis.units` as integers t, meaning e(t / basis.exponent)."""
        E = self.basis.exponent
        weights = np.array([e * (E // o) for e, o in zip(self.exponents, self.basis.orders)], dtype=np.int64)
        return (self.basis.dlog_matrix @ weights) % E

    @cached_property
    def parity(self) -> Parity:
        # For n <= 2, -1 = 1 and every character is even
        return Parity.ODD if self.angle(-1) == Fraction(1, 2) else Parity.EVEN

    @cached_property
    def conductor(self) -> int:
        """Smallest d | n such that χ(k) = 1 for every unit k = 1 mod d."""
        units = np.array(self.basis.units, dtype=np.int64)
        for d in divisors(self.modulus):
            on_kernel = (units - 1) % d == 0
            if not self.angle_vector[on_kernel].any():
                return d
        return self.modulus

    @property
    def order(self) -> int:
        return lcm(*(o // gcd(e, o) for e, o in zip(self.exponents, self.basis.orders))) if self.exponents else 1

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(
            modulus=self.modulus,
            exponents=tuple(-e % o for e, o in zip(self.exponents, self.basis.orders)),
        )

    @property
    def label(self) -> str:
        return f"{self.modulus}:{list(self.exponents)}"


@lru_cache(maxsize=512)
def _characters(n: int) -> Tuple[DirichletCharacter, ...]:
    orders = _basis(n).orders
    return tuple(
        DirichletCharacter(modulus=n, exponents=exps)
        for exps in product(*(range(o) for o in orders))
    )


def enumerate_characters(n: int) -> List[DirichletCharacter]:
    """All φ(n) characters mod n, lexicographic in their exponent vectors."""
    if n < 3:
        raise DomainError(f"n must be at least 3, got {n}")
    return list(_characters(n))


def evaluate(chi: DirichletCharacter, k: int) -> CharacterValue:
    return chi(k)


def parity(chi: DirichletCharacter) -> Parity:
    return chi.parity


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def component_conductor(chi: DirichletCharacter) -> int:
    """
    Conductor assembled prime power by prime power.

    An odd p^e factor with a character of order p^t * m (p not dividing m)
    contributes p^(t+1), or 1 if trivial. The 2-part contributes 4 when only the -1
    factor is nontrivial and 2^(t+2) when the 5 factor has order 2^t.
    """
    result = 1
    offset = 0
    for c in chi.basis.components:
        exps = chi.exponents[offset:offset + len(c.orders)]
        offset += len(c.orders)
        if c.prime != 2:
            (a,), (o,) = exps, c.orders
            if a:
                char_order = o // gcd(a, o)
                t = 0
                while char_order % c.prime == 0:
                    char_order //= c.prime
                    t += 1
                result *= c.prime ** (t + 1)
        elif c.exponent == 2:
            result *= 4 if exps[0] else 1
        elif c.exponent >= 3:
            a, b = exps
            if b:
                o = c.orders[1]
                result *= 4 * (o // gcd(b, o))
            elif a:
                result *= 4
    return result


def primitive_part(chi: DirichletCharacter) -> DirichletCharacter:
    """
    The primitive character mod f_χ inducing χ.

    For each generator g of (Z/f)^x, lift g to a unit l = g mod f of Z/n and read off χ(l).
    """
    n, f = chi.modulus, chi.conductor
    base = _basis(f)
    exponents = []
    for g, o in zip(base.lifted_generators, base.orders):
        l = g
        while gcd(l, n) != 1:
            l += f
        e = chi.angle(l) * o
        if e.denominator != 1:
            raise ArithmeticError(f"{chi.label} does not factor through mod {f}")
        exponents.append(int(e) % o)
    return DirichletCharacter(modulus=f, exponents=tuple(exponents))


def induced_character(base: DirichletCharacter, n: int) -> DirichletCharacter:
    """
    The character k -> base(k mod q) on the units mod n.

    Args:
        base: Character mod q
        n: Multiple of q

    Returns:
        The induced character mod n
    """
    q = base.modulus
    if n < 1 or n % q:
        raise DomainError(f"{q} does not divide {n}")
    target = _basis(n)
    exponents = []
    for g, o in zip(target.lifted_generators, target.orders):
        e = base.angle(g) * o
        exponents.append(int(e) % o)
    return DirichletCharacter(modulus=n, exponents=tuple(exponents))


@lru_cache(maxsize=64)
def unit_circle(E: int) -> np.ndarray:
    """e(t/E) for t in [0, E), exact at quarter turns."""
    roots = np.exp(2j * np.pi * np.arange(E) / E)
    roots[0] = 1
    if E % 2 == 0:
        roots[E // 2] = -1
    if E % 4 == 0:
        roots[E // 4] = 1j
        roots[3 * E // 4] = -1j
    roots.setflags(write=False)
    return roots


class CharacterTable(BaseModel):
    """Integer angle table of a set of characters mod n on the units mod n."""
    modulus: int
    characters: Tuple[DirichletCharacter, ...]
    units: np.ndarray
    angles: np.ndarray = Field(description="angles[i, j] = t with χ_i(units[j]) = e(t / exponent)")
    exponent: int
    conductors: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @cached_property
    def values(self) -> np.ndarray:
        return unit_circle(self.exponent)[self.angles]

    @cached_property
    def unit_index(self) -> Dict[int, int]:
        return {int(k): j for j, k in enumerate(self.units)}

    def column(self, k: int) -> int:
        """Column of the unit k (any integer congruent to a unit)."""
        return self.unit_index[k % self.modulus or self.modulus]

    @property
    def parities(self) -> List[Parity]:
        return [chi.parity for chi in self.characters]


def _conductors(angles: np.ndarray, units: np.ndarray, n: int) -> np.ndarray:
    result = np.zeros(len(angles), dtype=np.int64)
    for d in divisors(n):
        on_kernel = (units - 1) % d == 0
        trivial = ~angles[:, on_kernel].any(axis=1)
        result[(result == 0) & trivial] = d
    return result


@lru_cache(maxsize=256)
def character_table(n: int, parity: Optional[Parity] = None) -> CharacterTable:
    """
    Angle table for all characters mod n, or those of one parity, in canonical order.

    Args:
        n: Modulus, n >= 3
        parity: Restrict to odd or even characters

    Returns:
        Cached CharacterTable
    """
    chars = enumerate_characters(n)
    basis = _basis(n)
    E = basis.exponent
    weights = np.array(
        [[e * (E // o) for e, o in zip(chi.exponents, basis.orders)] for chi in chars], dtype=np.int64
    ).reshape(len(chars), len(basis.orders))
    angles = (weights @ basis.dlog_matrix.T) % E
    units = np.array(basis.units, dtype=np.int64)
    if parity is not None:
        parity = Parity(parity)
        minus_one = list(basis.units).index(n - 1)
        odd = angles[:, minus_one] * 2 == E
        keep = odd if parity is Parity.ODD else ~odd
        chars = [chi for chi, k in zip(chars, keep) if k]
        angles = angles[keep]
    angles.setflags(write=False)
    return CharacterTable(
        modulus=n,
        characters=tuple(chars),
        units=units,
        angles=angles,
        exponent=E,
        conductors=_conductors(angles, units, n),
    )


def exact_integer_sum(values: Iterable[CharacterValue]) -> Optional[int]:
    """
    Sum roots of unity exactly.

    The values become a polynomial in ζ_M (M the lcm of their orders), which is
    reduced modulo the M-th cyclotomic polynomial.

    Returns:
        The sum if it is a rational integer, else None
    """
    roots = [v for v in values if not v.zero]
    M = lcm(*(v.order for v in roots)) if roots else 1
    coeffs = [0] * M
    for v in roots:
        coeffs[v.numerator * (M // v.order)] += 1
    x = symbols("x")
    remainder = Poly(list(reversed(coeffs)), x).rem(Poly(cyclotomic_poly(M, x), x))
    if remainder.is_zero:
        return 0
    if remainder.degree() == 0:
        return int(remainder.LC())
    return None

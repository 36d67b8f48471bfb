import logging
from functools import lru_cache
from math import gcd
from typing import Dict, Optional

import numpy as np

from trig_inverse.model import MatrixKind, RhoConstant, SymbolicInverse, TrigEntry, TrigMatrix
from trig_inverse.ntheory import (
    DomainError,
    canonical_residue,
    lambda_count,
    mod_inverse,
    representative_set,
    square_divisor,
)

logger = logging.getLogger("trigmat")


class SingularMatrixError(DomainError):
    """An inverse was requested for a singular sine or cosine matrix."""
    pass


def trig_values(n: int, kind: MatrixKind) -> np.ndarray:
    """s_l = 2 sin(2πl/n) or c_l = 2 cos(2πl/n) for l in R."""
    members = np.array(representative_set(n).members)
    angles = 2 * np.pi * members / n
    if MatrixKind(kind) is MatrixKind.SINE:
        return 2 * np.sin(angles)
    values = 2 * np.cos(angles)
    # c_{n/4} = 0 exactly (only n = 4 has n/4 in R)
    values[4 * members == n] = 0.0
    return values


def rho(n: int) -> int:
    return RhoConstant.for_modulus(n).value


def _assemble(n: int, kind: MatrixKind, base: np.ndarray, hat: bool) -> TrigMatrix:
    """Entry (j, k) is sign * base[l] where j k* = sign * l mod n; cosine ignores the sign."""
    R = representative_set(n)
    rows = []
    for j in R.members:
        row = []
        for k in R.members:
            residue = canonical_residue(j * mod_inverse(k, n), R)
            sign = residue.sign if kind is MatrixKind.SINE else 1
            l = residue.representative
            row.append(TrigEntry(kind=kind, sign=sign, index=l, value=sign * float(base[R.position(l)]), hat=hat))
        rows.append(tuple(row))
    return TrigMatrix(kind=kind, modulus=n, representatives=R, entries=tuple(rows), hat=hat)


@lru_cache(maxsize=512)
def build_matrix(n: int, kind: MatrixKind) -> TrigMatrix:
    """
    The sine matrix S = (s_{jk*}) or cosine matrix C = (c_{jk*}), j, k in R.

    Args:
        n: Modulus, n >= 3
        kind: sine or cosine

    Returns:
        φ(n)/2-dimensional TrigMatrix with symbolic tags and float values
    """
    if n < 3:
        raise DomainError(f"n must be at least 3, got {n}")
    kind = MatrixKind(kind)
    matrix = _assemble(n, kind, trig_values(n, kind), hat=False)
    logger.debug(f"Built {kind.value} matrix mod {n} of dimension {matrix.dimension}")
    return matrix


def singularity_reason(n: int, kind: MatrixKind) -> Optional[str]:
    """Why the matrix is singular, or None if it is invertible."""
    if n < 3:
        raise DomainError(f"n must be at least 3, got {n}")
    p = square_divisor(n)
    if p is None:
        return None
    if n == 4:
        if MatrixKind(kind) is MatrixKind.SINE:
            return None
        return "4 is divisible by 2² (the n=4 exception covers the sine matrix only)"
    return f"{n} is divisible by {p}²"


def is_invertible(n: int, kind: MatrixKind) -> bool:
    """Sine: n square-free or n = 4. Cosine: n square-free."""
    return singularity_reason(n, kind) is None


def _require_invertible(n: int, kind: MatrixKind) -> None:
    reason = singularity_reason(n, kind)
    if reason is not None:
        raise SingularMatrixError(f"The {MatrixKind(kind).value} matrix mod {n} is singular: {reason}")


def _lambda_table(n: int) -> Dict[int, int]:
    return {x: lambda_count(x, n) for x in range(1, n) if gcd(x, n) == 1}


@lru_cache(maxsize=512)
def hat_coefficients(n: int, kind: MatrixKind) -> SymbolicInverse:
    """
    Exact expansions of ŝ_l (resp. ĉ_l) over s_m (resp. c_m), l, m in R.

    The numerator of the coefficient of s_m in ŝ_l is λ(ml) - λ(-ml);
    for ĉ_l it is λ(ml) + λ(-ml) + ρ_n. The denominator is always n.
    """
    kind = MatrixKind(kind)
    _require_invertible(n, kind)
    R = representative_set(n)
    lam = _lambda_table(n)
    r = rho(n)
    numerators = []
    for l in R.members:
        row = []
        for m in R.members:
            plus, minus = lam[m * l % n], lam[-m * l % n]
            row.append(plus - minus if kind is MatrixKind.SINE else plus + minus + r)
        numerators.append(tuple(row))
    return SymbolicInverse(kind=kind, modulus=n, representatives=R, numerators=tuple(numerators))


def hat_values(n: int, kind: MatrixKind) -> np.ndarray:
    """ŝ_l (resp. ĉ_l) as floats for l in R."""
    coefficients = hat_coefficients(n, kind)
    numerators = np.array(coefficients.numerators, dtype=float)
    return numerators @ trig_values(n, kind) / coefficients.denominator


@lru_cache(maxsize=512)
def explicit_inverse(n: int, kind: MatrixKind) -> TrigMatrix:
    """
    S^-1 = (ŝ_{jk*}) or C^-1 = (ĉ_{jk*}).

    The inverse has the sign/index pattern of the matrix itself with every
    s_l replaced by ŝ_l (c_l by ĉ_l).
    """
    kind = MatrixKind(kind)
    if n < 3:
        raise DomainError(f"n must be at least 3, got {n}")
    _require_invertible(n, kind)
    inverse = _assemble(n, kind, hat_values(n, kind), hat=True)
    logger.debug(f"Assembled explicit {kind.value} inverse mod {n}")
    return inverse


def hat_value(k: int, n: int, kind: MatrixKind) -> float:
    """
    ŝ_k or ĉ_k for any k coprime to n.

    Uses ŝ_{-k} = -ŝ_k and ĉ_{-k} = ĉ_k to reduce k into R.
    """
    kind = MatrixKind(kind)
    R = representative_set(n)
    residue = canonical_residue(k, R)
    _require_invertible(n, kind)
    value = float(hat_values(n, kind)[R.position(residue.representative)])
    return residue.sign * value if kind is MatrixKind.SINE else value

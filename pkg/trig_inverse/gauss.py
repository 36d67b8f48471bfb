import logging
from enum import Enum
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from trig_inverse.characters import (
    DirichletCharacter,
    character_table,
    primitive_part,
    unit_circle,
)
from trig_inverse.config import Settings, get_settings
from trig_inverse.model import MatrixKind, Parity
from trig_inverse.ntheory import DomainError, moebius

logger = logging.getLogger("gauss")


class GaussMethod(str, Enum):
    DIRECT = "direct"
    REDUCED = "reduced"


class GaussSum(BaseModel):
    """τ(χ) together with how it was obtained."""
    character: DirichletCharacter
    value: complex
    method: GaussMethod

    model_config = ConfigDict(frozen=True)


def _zeta_powers(n: int, k: np.ndarray) -> np.ndarray:
    """ζ_n^k for an integer array k."""
    return unit_circle(n)[np.asarray(k) % n]


def gauss_sum_direct(chi: DirichletCharacter) -> complex:
    """
    τ(χ) = sum_{k=1}^{n} χ(k) ζ_n^k by direct summation.

    The trivial character mod 1 gives 1.
    """
    n = chi.modulus
    values = unit_circle(chi.basis.exponent)[chi.angle_vector]
    return complex(np.sum(values * _zeta_powers(n, np.array(chi.basis.units))))


def gauss_sum_reduced(chi: DirichletCharacter) -> complex:
    """
    τ(χ) = μ(n/f) χ_f(n/f) τ(χ_f), with τ(χ_f) summed directly at modulus f.

    Returns τ of the character passed in. For τ(conj χ) = μ(n/f) conj χ_f(n/f) τ(conj χ_f),
    call it with chi.conjugate(), as `spectrum` does. Vanishing factors give an exact 0.
    """
    n, f = chi.modulus, chi.conductor
    m = n // f
    mu = moebius(m)
    if mu == 0:
        return 0j
    prim = primitive_part(chi)
    value = prim(m)
    if value.zero:
        return 0j
    return mu * value.to_complex() * gauss_sum_direct(prim)


def gauss_sum(chi: DirichletCharacter, method: GaussMethod = GaussMethod.REDUCED) -> GaussSum:
    method = GaussMethod(method)
    value = gauss_sum_direct(chi) if method is GaussMethod.DIRECT else gauss_sum_reduced(chi)
    return GaussSum(character=chi, value=value, method=method)


def gauss_product_check(chi: DirichletCharacter) -> float:
    """
    |τ(χ_f) τ(conj χ_f) - σ f| for the primitive part χ_f of χ.

    σ is -1 for odd and +1 for even characters; the product is χ_f(-1) f.
    """
    prim = primitive_part(chi)
    sigma = -1 if chi.parity is Parity.ODD else 1
    product = gauss_sum_direct(prim) * gauss_sum_direct(prim.conjugate())
    return abs(product - sigma * prim.modulus)


def gauss_sums(n: int, parity: Optional[Parity] = None) -> np.ndarray:
    """Direct Gauss sums τ(χ) of all characters mod n (or one parity), canonical order."""
    table = character_table(n, parity)
    return table.values @ _zeta_powers(n, table.units)


class SpectralData(BaseModel):
    """Eigenvalues of S (odd characters) or C (even characters) mod n."""
    kind: MatrixKind
    modulus: int
    characters: Tuple[DirichletCharacter, ...]
    conjugate_gauss_sums: np.ndarray
    eigenvalues: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @cached_property
    def diagonal_matrix(self) -> np.ndarray:
        """T = diag(τ(conj χ))."""
        return np.diag(self.conjugate_gauss_sums)

    @property
    def pairs(self) -> List[Tuple[DirichletCharacter, complex]]:
        return [(chi, complex(lam)) for chi, lam in zip(self.characters, self.eigenvalues)]


def spectrum(n: int, kind: MatrixKind, method: GaussMethod = GaussMethod.REDUCED) -> SpectralData:
    """
    Eigenvalues of the sine or cosine matrix mod n.

    Args:
        n: Modulus, n >= 3
        kind: sine (eigenvalues -i τ(conj χ), χ odd) or cosine (τ(conj χ), χ even)
        method: How the Gauss sums are evaluated; the reduced form yields exact zeros

    Returns:
        SpectralData in canonical character order
    """
    if n < 3:
        raise DomainError(f"n must be at least 3, got {n}")
    kind = MatrixKind(kind)
    table = character_table(n, Parity.for_kind(kind))
    if GaussMethod(method) is GaussMethod.REDUCED:
        taus = np.array([gauss_sum_reduced(chi.conjugate()) for chi in table.characters], dtype=complex)
    else:
        taus = np.conj(table.values) @ _zeta_powers(n, table.units)
    eigenvalues = -1j * taus if kind is MatrixKind.SINE else taus.copy()
    taus.setflags(write=False)
    eigenvalues.setflags(write=False)
    logger.debug(f"Spectrum of the {kind.value} matrix mod {n}: {len(eigenvalues)} eigenvalues")
    return SpectralData(
        kind=kind,
        modulus=n,
        characters=table.characters,
        conjugate_gauss_sums=taus,
        eigenvalues=eigenvalues,
    )


def zero_eigenvalue_count(data: SpectralData, settings: Optional[Settings] = None) -> int:
    """
    Eigenvalues below the zero threshold.

    Nonzero eigenvalues have modulus sqrt(f) >= 1, so the default 1e-9 separates cleanly.
    """
    settings = settings or get_settings()
    return int(np.sum(np.abs(data.eigenvalues) < settings.zero_eigenvalue_tolerance))

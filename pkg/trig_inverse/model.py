from enum import Enum
from functools import cached_property
from math import gcd
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class MatrixKind(str, Enum):
    SINE = "sine"
    COSINE = "cosine"


class Parity(str, Enum):
    ODD = "odd"
    EVEN = "even"

    @classmethod
    def for_kind(cls, kind: MatrixKind) -> "Parity":
        """The sine matrix lives on the odd characters, the cosine matrix on the even ones."""
        return cls.ODD if MatrixKind(kind) is MatrixKind.SINE else cls.EVEN


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"


class RepresentativeSet(BaseModel):
    """One residue from each {k, -k} pair of units mod n, ascending."""
    modulus: int = Field(ge=3, description="The modulus n")
    members: Tuple[int, ...] = Field(description="Representatives l with 1 <= l <= n/2, gcd(l, n) = 1")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_members(self) -> "RepresentativeSet":
        n = self.modulus
        if list(self.members) != sorted(set(self.members)):
            raise ValueError("members must be strictly ascending")
        for l in self.members:
            if not (1 <= l and 2 * l <= n and gcd(l, n) == 1):
                raise ValueError(f"{l} is not a representative mod {n}")
        return self

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, l: object) -> bool:
        return l in self.positions_map

    @cached_property
    def positions_map(self) -> Dict[int, int]:
        return {l: i for i, l in enumerate(self.members)}

    def position(self, l: int) -> int:
        """Row/column index of representative l."""
        return self.positions_map[l]


class CanonicalResidue(BaseModel):
    """A unit x written as x = sign * representative mod n."""
    sign: int = Field(description="+1 or -1")
    representative: int = Field(ge=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_sign(self) -> "CanonicalResidue":
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        return self


class TrigEntry(BaseModel):
    """One entry of S, C, or of their inverses: sign * s_l, c_l, sign * ŝ_l or ĉ_l."""
    kind: MatrixKind
    sign: int = Field(description="+1 or -1; always +1 for cosine")
    index: int = Field(ge=1, description="Representative l")
    value: float
    hat: bool = Field(False, description="True for entries of the inverse (ŝ_l, ĉ_l)")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_sign(self) -> "TrigEntry":
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.kind is MatrixKind.COSINE and self.sign != 1:
            raise ValueError("cosine entries carry no sign")
        return self

    @property
    def symbol(self) -> str:
        letter = "s" if self.kind is MatrixKind.SINE else "c"
        if self.hat:
            letter = "ŝ" if self.kind is MatrixKind.SINE else "ĉ"
        return f"{'-' if self.sign < 0 else ''}{letter}_{self.index}"


class TrigMatrix(BaseModel):
    """Dense matrix over R x R; row j, column k holds the entry for j*k^-1 mod n."""
    kind: MatrixKind
    modulus: int
    representatives: RepresentativeSet
    entries: Tuple[Tuple[TrigEntry, ...], ...]
    hat: bool = False

    model_config = ConfigDict(frozen=True)

    @property
    def dimension(self) -> int:
        return len(self.representatives)

    @cached_property
    def values(self) -> np.ndarray:
        out = np.array([[e.value for e in row] for row in self.entries], dtype=float)
        out = out.reshape(self.dimension, self.dimension)
        out.setflags(write=False)
        return out

    def entry(self, j: int, k: int) -> TrigEntry:
        """Entry at representatives (j, k), not at array positions."""
        R = self.representatives
        return self.entries[R.position(j)][R.position(k)]


class SymbolicInverse(BaseModel):
    """ŝ_l = sum_m numerators[l][m] / n * s_m (resp. ĉ_l over c_m), l and m running through R."""
    kind: MatrixKind
    modulus: int
    representatives: RepresentativeSet
    numerators: Tuple[Tuple[int, ...], ...] = Field(description="Row per l in R, column per m in R")

    model_config = ConfigDict(frozen=True)

    @property
    def denominator(self) -> int:
        # Kept at n, never reduced
        return self.modulus

    def row(self, l: int) -> Tuple[int, ...]:
        return self.numerators[self.representatives.position(l)]

    def coefficient(self, l: int, m: int) -> Tuple[int, int]:
        """(numerator, denominator) of the coefficient of s_m in ŝ_l."""
        return self.row(l)[self.representatives.position(m)], self.denominator


class RhoConstant(BaseModel):
    """Parity constant of the cosine inverse: 2 for odd n, 4 for even n."""
    value: int

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_value(self) -> "RhoConstant":
        if self.value not in (2, 4):
            raise ValueError(f"rho is 2 or 4, got {self.value}")
        return self

    @classmethod
    def for_modulus(cls, n: int) -> "RhoConstant":
        return cls(value=2 if n % 2 else 4)


class CheckReport(BaseModel):
    """Outcome of one identity check at one modulus."""
    check: str = Field(description="Check name")
    modulus: int
    variant: Optional[str] = Field(None, description="Matrix kind or character parity, when the check has one")
    status: CheckStatus
    max_residual: Optional[float] = Field(None, description="None for skipped checks")
    tolerance: float
    elapsed_seconds: float = 0.0
    detail: str = ""

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_status(self) -> "CheckReport":
        if self.status is CheckStatus.SKIP:
            if self.max_residual is not None:
                raise ValueError("skipped checks carry no residual")
        elif self.max_residual is None:
            raise ValueError("executed checks need a residual")
        elif (self.max_residual <= self.tolerance) != (self.status is CheckStatus.PASS):
            raise ValueError("status must be pass exactly when max_residual <= tolerance")
        return self

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS


class SweepSummary(BaseModel):
    """Aggregated counts of a sweep."""
    passed: int = 0
    failed: int = 0
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return self.failed == 0


class OutputDocument(BaseModel):
    """Everything the CLI writes to stdout."""
    schema_version: str
    command: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    payload: Dict[str, Any] = Field(default_factory=dict)


def reports_summary(reports: List[CheckReport]) -> SweepSummary:
    summary = SweepSummary()
    for report in reports:
        if report.status is CheckStatus.PASS:
            summary.passed += 1
        elif report.status is CheckStatus.FAIL:
            summary.failed += 1
        else:
            summary.skipped += 1
    return summary

import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from itertools import groupby
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from trig_inverse.characters import character_table, enumerate_characters
from trig_inverse.config import Settings, get_settings
from trig_inverse.gauss import (
    gauss_product_check,
    gauss_sum_direct,
    gauss_sum_reduced,
    spectrum,
    zero_eigenvalue_count,
)
from trig_inverse.model import CheckReport, CheckStatus, MatrixKind, Parity, reports_summary
from trig_inverse.ntheory import DomainError, divisors, euler_phi, is_squarefree, lambda_count, representative_set
from trig_inverse.trigmat import (
    build_matrix,
    explicit_inverse,
    hat_coefficients,
    is_invertible,
    rho,
    singularity_reason,
)
from trig_inverse.utils.functions import identity_residual, max_abs

logger = logging.getLogger("verify")


class OracleSingularError(ArithmeticError):
    """Elimination met a pivot that is zero to working precision."""
    pass


class OracleInverse(BaseModel):
    inverse: np.ndarray
    min_pivot: float
    scale: float

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def _as_square(M) -> np.ndarray:
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def oracle_inverse(M, settings: Optional[Settings] = None) -> OracleInverse:
    """
    Gauss-Jordan inverse with scaled partial pivoting.

    Args:
        M: Square real matrix
        settings: pivot_tolerance is taken relative to the largest entry of M

    Returns:
        OracleInverse with the smallest pivot met

    Raises:
        ValueError: M is not square
        OracleSingularError: a pivot fell below pivot_tolerance * scale
    """
    settings = settings or get_settings()
    A = _as_square(M)
    n = len(A)
    scale = max_abs(A)
    if n and scale == 0:
        raise OracleSingularError("zero matrix")
    threshold = settings.pivot_tolerance * scale
    aug = np.hstack([A, np.eye(n)])
    row_scale = np.max(np.abs(A), axis=1) if n else np.zeros(0)
    row_scale = np.where(row_scale > 0, row_scale, 1.0)
    min_pivot = np.inf
    for col in range(n):
        p = col + int(np.argmax(np.abs(aug[col:, col]) / row_scale[col:]))
        pivot = aug[p, col]
        if abs(pivot) <= threshold:
            raise OracleSingularError(f"pivot {abs(pivot):.3g} in column {col} is below {threshold:.3g}")
        if p != col:
            aug[[col, p]] = aug[[p, col]]
            row_scale[[col, p]] = row_scale[[p, col]]
        min_pivot = min(min_pivot, abs(pivot))
        aug[col] /= pivot
        others = np.arange(n) != col
        aug[others] -= np.outer(aug[others, col], aug[col])
    return OracleInverse(inverse=aug[:, n:], min_pivot=float(min_pivot), scale=scale)


def oracle_rank(M, settings: Optional[Settings] = None) -> int:
    """Rank from row echelon form; pivots at or below rank_tolerance * scale count as zero."""
    settings = settings or get_settings()
    A = _as_square(M).copy()
    rows, cols = A.shape
    scale = max_abs(A)
    if scale == 0:
        return 0
    threshold = settings.rank_tolerance * scale
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        column = np.abs(A[rank:, col])
        if column.max() <= threshold:
            continue
        p = rank + int(np.argmax(column))
        A[[rank, p]] = A[[p, rank]]
        A[rank + 1:] -= np.outer(A[rank + 1:, col] / A[rank, col], A[rank])
        rank += 1
    return rank


def oracle_determinant(M) -> float:
    """Determinant as the signed product of partial-pivoting LU pivots."""
    A = _as_square(M).copy()
    n = len(A)
    det = 1.0
    for col in range(n):
        p = col + int(np.argmax(np.abs(A[col:, col])))
        if A[p, col] == 0:
            return 0.0
        if p != col:
            A[[col, p]] = A[[p, col]]
            det = -det
        det *= A[col, col]
        A[col + 1:] -= np.outer(A[col + 1:, col] / A[col, col], A[col])
    return float(det)


def _report(
    check: str,
    n: int,
    variant: Optional[str],
    residual: float,
    tolerance: float,
    started: float,
    detail: str = "",
) -> CheckReport:
    status = CheckStatus.PASS if residual <= tolerance else CheckStatus.FAIL
    return CheckReport(
        check=check,
        modulus=n,
        variant=variant,
        status=status,
        max_residual=float(residual),
        tolerance=tolerance,
        elapsed_seconds=time.perf_counter() - started,
        detail=detail,
    )


def character_matrix(n: int, parity: Parity) -> np.ndarray:
    """X = sqrt(2/φ(n)) (χ(k)), rows k in R, columns χ of the given parity."""
    table = character_table(n, parity)
    R = representative_set(n)
    columns = [table.column(k) for k in R.members]
    return np.sqrt(2 / euler_phi(n)) * table.values[:, columns].T


def check_orthogonality(n: int, parity: Parity, settings: Optional[Settings] = None) -> CheckReport:
    """sum_χ χ(k) over one parity is 0 for k ≠ ±1, φ(n)/2 at k = 1, and ∓φ(n)/2 at k = -1."""
    started = time.perf_counter()
    settings = settings or get_settings()
    parity = Parity(parity)
    table = character_table(n, parity)
    half = euler_phi(n) // 2
    expected = np.zeros(len(table.units))
    expected[table.column(1)] = half
    expected[table.column(-1)] = -half if parity is Parity.ODD else half
    residual = max_abs(table.values.sum(axis=0) - expected)
    return _report("orthogonality", n, parity.value, residual, settings.identity_tolerance, started)


def check_unitary(n: int, parity: Parity, settings: Optional[Settings] = None) -> CheckReport:
    started = time.perf_counter()
    settings = settings or get_settings()
    parity = Parity(parity)
    X = character_matrix(n, parity)
    residual = max(identity_residual(X @ X.conj().T), identity_residual(X.conj().T @ X))
    return _report("unitary", n, parity.value, residual, settings.matrix_tolerance, started)


def check_diagonalization(n: int, kind: MatrixKind, settings: Optional[Settings] = None) -> CheckReport:
    """conj(X)^t S X = -iT and conj(X)^t C X = T, singular n included."""
    started = time.perf_counter()
    settings = settings or get_settings()
    kind = MatrixKind(kind)
    M = build_matrix(n, kind).values
    X = character_matrix(n, Parity.for_kind(kind))
    D = np.diag(spectrum(n, kind).eigenvalues)
    residual = max_abs(X.conj().T @ M @ X - D)
    return _report("diagonalization", n, kind.value, residual, settings.matrix_tolerance, started)


def _lemma2_hypothesis(n: int, parity: Parity) -> Optional[str]:
    if Parity(parity) is Parity.ODD and not (is_squarefree(n) or n == 4):
        return f"odd identity needs n square-free or n = 4, got {n}"
    if Parity(parity) is Parity.EVEN and not is_squarefree(n):
        return f"even identity needs n square-free, got {n}"
    return None


def check_lemma2(n: int, parity: Parity, settings: Optional[Settings] = None) -> CheckReport:
    """
    sum_χ χ(k)/f_χ against (φ(n)/2n) Δ(k), both sides computed independently.

    Δ(k) is λ(k) - λ(-k) for odd characters and λ(k) + λ(-k) + ρ_n for even ones.

    Raises:
        DomainError: n is not square-free (and, for odd characters, not 4)
    """
    started = time.perf_counter()
    settings = settings or get_settings()
    parity = Parity(parity)
    unmet = _lemma2_hypothesis(n, parity)
    if unmet is not None:
        raise DomainError(unmet)
    table = character_table(n, parity)
    lhs = (table.values / table.conductors[:, None]).sum(axis=0)
    factor = euler_phi(n) / (2 * n)
    rhs = []
    for k in table.units:
        k = int(k)
        plus, minus = lambda_count(k, n), lambda_count(-k, n)
        rhs.append(factor * (plus - minus if parity is Parity.ODD else plus + minus + rho(n)))
    residual = max_abs(lhs - np.array(rhs))
    return _report("lemma2", n, parity.value, residual, settings.identity_tolerance, started)


def check_gauss(n: int, settings: Optional[Settings] = None) -> CheckReport:
    """Reduction formula vs direct summation, the product relation, and |τ|² = f for primitive χ."""
    started = time.perf_counter()
    settings = settings or get_settings()
    residual = 0.0
    for chi in enumerate_characters(n):
        direct = gauss_sum_direct(chi)
        residual = max(residual, abs(direct - gauss_sum_reduced(chi)), gauss_product_check(chi))
        if chi.is_primitive:
            residual = max(residual, abs(abs(direct) ** 2 - chi.conductor))
    return _report("gauss", n, None, residual, settings.gauss_tolerance, started)


def check_invertibility(n: int, kind: MatrixKind, settings: Optional[Settings] = None) -> CheckReport:
    """
    Criterion, elimination rank and zero eigenvalues must tell the same story.

    The residual counts disagreements, so the tolerance is 0.
    """
    started = time.perf_counter()
    settings = settings or get_settings()
    kind = MatrixKind(kind)
    matrix = build_matrix(n, kind)
    dim = matrix.dimension
    criterion = is_invertible(n, kind)
    rank = oracle_rank(matrix.values, settings)
    zeros = zero_eigenvalue_count(spectrum(n, kind), settings)
    mismatches = int(criterion != (rank == dim)) + int(criterion != (zeros == 0)) + int(dim - rank != zeros)
    if criterion:
        detail = f"invertible; rank {rank}/{dim}, {zeros} zero eigenvalues"
    else:
        detail = f"EXPECTED-singular ({singularity_reason(n, kind)}); rank {rank}/{dim}, {zeros} zero eigenvalues"
    return _report("invertibility", n, kind.value, mismatches, 0.0, started, detail)


def check_inverse(n: int, kind: MatrixKind, settings: Optional[Settings] = None) -> CheckReport:
    """
    M M̂ = M̂ M = I and M̂ equal to the elimination inverse.

    Raises:
        SingularMatrixError: the matrix is singular
    """
    started = time.perf_counter()
    settings = settings or get_settings()
    kind = MatrixKind(kind)
    inverse = explicit_inverse(n, kind).values
    M = build_matrix(n, kind).values
    oracle = oracle_inverse(M, settings).inverse
    residual = max(identity_residual(M @ inverse), identity_residual(inverse @ M), max_abs(inverse - oracle))
    return _report("inverse", n, kind.value, residual, settings.matrix_tolerance, started)


def check_coefficients(n: int, kind: MatrixKind, settings: Optional[Settings] = None) -> CheckReport:
    """
    Bounds on the integer numerators of ŝ_l / ĉ_l.

    |numerator| <= number of divisors q >= 3 of n for sine; ρ_n <= numerator <= that count + ρ_n for cosine.
    The residual is the largest violation.
    """
    started = time.perf_counter()
    settings = settings or get_settings()
    kind = MatrixKind(kind)
    coefficients = hat_coefficients(n, kind)
    numerators = np.array(coefficients.numerators, dtype=np.int64)
    bound = sum(1 for q in divisors(n) if q >= 3)
    if kind is MatrixKind.SINE:
        violation = np.maximum(np.abs(numerators) - bound, 0)
    else:
        r = rho(n)
        violation = np.maximum(np.maximum(numerators - bound - r, r - numerators), 0)
    return _report("coefficients", n, kind.value, float(violation.max(initial=0)), 0.0, started)


def check_determinant(n: int, kind: MatrixKind, settings: Optional[Settings] = None) -> CheckReport:
    """Product of the Gauss-sum eigenvalues against the elimination determinant."""
    started = time.perf_counter()
    settings = settings or get_settings()
    kind = MatrixKind(kind)
    det = oracle_determinant(build_matrix(n, kind).values)
    product = complex(np.prod(spectrum(n, kind).eigenvalues))
    residual = abs(product - det) / max(1.0, abs(det))
    return _report("determinant", n, kind.value, residual, settings.determinant_tolerance, started)


class CheckName(str, Enum):
    ORTHOGONALITY = "orthogonality"
    UNITARY = "unitary"
    DIAGONALIZATION = "diagonalization"
    LEMMA2 = "lemma2"
    GAUSS = "gauss"
    INVERTIBILITY = "invertibility"
    INVERSE = "inverse"
    COEFFICIENTS = "coefficients"
    DETERMINANT = "determinant"


_PARITIES = (Parity.ODD, Parity.EVEN)
_KINDS = (MatrixKind.SINE, MatrixKind.COSINE)

CHECKS: Dict[CheckName, Tuple[Callable[..., CheckReport], Sequence[Optional[Enum]]]] = {
    CheckName.ORTHOGONALITY: (check_orthogonality, _PARITIES),
    CheckName.UNITARY: (check_unitary, _PARITIES),
    CheckName.DIAGONALIZATION: (check_diagonalization, _KINDS),
    CheckName.LEMMA2: (check_lemma2, _PARITIES),
    CheckName.GAUSS: (check_gauss, (None,)),
    CheckName.INVERTIBILITY: (check_invertibility, _KINDS),
    CheckName.INVERSE: (check_inverse, _KINDS),
    CheckName.COEFFICIENTS: (check_coefficients, _KINDS),
    CheckName.DETERMINANT: (check_determinant, _KINDS),
}


def unmet_hypothesis(name: CheckName, n: int, variant: Optional[Enum]) -> Optional[str]:
    """Why a check does not apply at (n, variant), or None if it does."""
    name = CheckName(name)
    if name is CheckName.LEMMA2:
        return _lemma2_hypothesis(n, variant)
    if name in (CheckName.INVERSE, CheckName.COEFFICIENTS):
        reason = singularity_reason(n, variant)
        if reason is not None:
            return f"The {MatrixKind(variant).value} matrix mod {n} is singular: {reason}"
    return None


def run_check(name: CheckName, n: int, variant: Optional[Enum], settings: Optional[Settings] = None) -> CheckReport:
    """
    Run one check.

    Only an unmet hypothesis gives a skip record. A DomainError raised by a check
    whose hypothesis holds is recorded as a failure with an infinite residual.
    """
    name = CheckName(name)
    check, _ = CHECKS[name]
    started = time.perf_counter()
    settings = settings or get_settings()
    label = variant.value if variant is not None else None
    unmet = unmet_hypothesis(name, n, variant)
    if unmet is not None:
        logger.debug(f"Skipping {name.value} at n={n}: {unmet}")
        return CheckReport(
            check=name.value,
            modulus=n,
            variant=label,
            status=CheckStatus.SKIP,
            tolerance=0.0,
            elapsed_seconds=time.perf_counter() - started,
            detail=unmet,
        )
    try:
        if variant is None:
            return check(n, settings=settings)
        return check(n, variant, settings=settings)
    except DomainError as e:
        logger.error(f"{name.value} raised at n={n} ({label}) although its hypothesis holds: {e}")
        return CheckReport(
            check=name.value,
            modulus=n,
            variant=label,
            status=CheckStatus.FAIL,
            max_residual=float("inf"),
            tolerance=0.0,
            elapsed_seconds=time.perf_counter() - started,
            detail=f"unexpected domain error: {e}",
        )


def sweep(
    n_min: int,
    n_max: int,
    checks: Optional[Iterable[CheckName]] = None,
    settings: Optional[Settings] = None,
    workers: Optional[int] = None,
    progress: bool = False,
) -> List[CheckReport]:
    """
    Run the selected checks for every n in [n_min, n_max].

    Reports come back ordered by n, then check, then variant, whatever the thread schedule.
    """
    if not 3 <= n_min <= n_max:
        raise DomainError(f"need 3 <= n_min <= n_max, got [{n_min}, {n_max}]")
    settings = settings or get_settings()
    selected = [CheckName(c) for c in checks] if checks is not None else list(CheckName)
    tasks = [
        (name, n, variant)
        for n in range(n_min, n_max + 1)
        for name in selected
        for variant in CHECKS[name][1]
    ]
    logger.info(f"Running {len(tasks)} checks for n in [{n_min}, {n_max}]")
    with ThreadPoolExecutor(max_workers=workers or settings.sweep_workers) as pool:
        results = pool.map(lambda task: run_check(*task, settings=settings), tasks)
        reports = list(tqdm(results, total=len(tasks), disable=not progress, file=sys.stderr, desc="verify"))
    for report in reports:
        if report.status is CheckStatus.FAIL:
            logger.warning(
                f"{report.check} failed at n={report.modulus} ({report.variant}): "
                f"residual {report.max_residual:.3g} > {report.tolerance:.3g}"
            )
    for n, group in groupby(reports, key=lambda r: r.modulus):
        counts = reports_summary(list(group))
        logger.info(f"n={n}: {counts.passed} passed, {counts.failed} failed, {counts.skipped} skipped")
    summary = reports_summary(reports)
    logger.info(f"Sweep done: {summary.passed} passed, {summary.failed} failed, {summary.skipped} skipped")
    return reports

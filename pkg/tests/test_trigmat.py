from math import cos, gcd, pi, sin, sqrt

import numpy as np
from hypothesis import given
from hypothesis.strategies import integers
from pytest import approx, mark, raises

from trig_inverse.model import MatrixKind, RhoConstant
from trig_inverse.ntheory import DomainError, canonical_residue, divisors, lambda_count, mod_inverse, representative_set
from trig_inverse.trigmat import (
    SingularMatrixError,
    build_matrix,
    explicit_inverse,
    hat_coefficients,
    hat_value,
    hat_values,
    is_invertible,
    rho,
    singularity_reason,
    trig_values,
)
from conftest import SQUAREFREE_UP_TO_200

SINE, COSINE = MatrixKind.SINE, MatrixKind.COSINE

# Sign/index pattern of the n = 15 sine matrix, rows and columns over R = (1, 2, 4, 7)
PATTERN_15 = [
    ["s_1", "-s_7", "s_4", "-s_2"],
    ["s_2", "s_1", "-s_7", "-s_4"],
    ["s_4", "s_2", "s_1", "s_7"],
    ["s_7", "-s_4", "-s_2", "s_1"],
]


def s(l, n):
    return 2 * sin(2 * pi * l / n)


def test_build_matrix_15_sine_pattern():
    matrix = build_matrix(15, SINE)
    assert matrix.dimension == 4
    assert [[e.symbol for e in row] for row in matrix.entries] == PATTERN_15
    for row in matrix.entries:
        for e in row:
            assert e.value == approx(e.sign * s(e.index, 15), abs=1e-15)


def test_build_matrix_small_cases():
    assert build_matrix(3, SINE).values.tolist() == [[approx(sqrt(3), abs=1e-15)]]
    assert build_matrix(4, COSINE).values.tolist() == [[0.0]]
    assert build_matrix(7, COSINE).dimension == 3


@mark.parametrize("n", [0, 1, 2])
def test_build_matrix_rejects_small_moduli(n):
    with raises(DomainError):
        build_matrix(n, SINE)


@mark.parametrize("kind", [SINE, COSINE])
def test_entries_follow_canonical_residue(kind):
    for n in (5, 12, 15, 16, 30, 45):
        matrix = build_matrix(n, kind)
        R = matrix.representatives
        first = trig_values(n, kind)[0]
        for j in R.members:
            for k in R.members:
                entry = matrix.entry(j, k)
                residue = canonical_residue(j * mod_inverse(k, n), R)
                assert entry.index == residue.representative
                assert entry.sign == (residue.sign if kind is SINE else 1)
            assert matrix.entry(j, j).value == first


def test_cosine_entries_match_definition():
    n = 21
    matrix = build_matrix(n, COSINE)
    for j in matrix.representatives.members:
        for k in matrix.representatives.members:
            assert matrix.entry(j, k).value == approx(2 * cos(2 * pi * j * mod_inverse(k, n) / n), abs=1e-12)


def test_rho():
    assert rho(7) == 2 and rho(30) == 4
    assert RhoConstant.for_modulus(15).value == 2
    with raises(ValueError):
        RhoConstant(value=3)


def test_is_invertible_examples():
    assert is_invertible(4, SINE) and not is_invertible(4, COSINE)
    assert not is_invertible(9, SINE)
    assert is_invertible(15, COSINE)


def test_invertibility_criteria():
    squarefree = set(SQUAREFREE_UP_TO_200)
    for n in range(3, 201):
        assert is_invertible(n, SINE) == (n in squarefree or n == 4)
        assert is_invertible(n, COSINE) == (n in squarefree)


def test_singularity_reasons():
    assert singularity_reason(9, SINE) == "9 is divisible by 3²"
    assert singularity_reason(4, SINE) is None
    assert "n=4" in singularity_reason(4, COSINE)
    assert singularity_reason(50, COSINE) == "50 is divisible by 5²"
    assert singularity_reason(15, COSINE) is None


def test_hat_coefficients_15_sine():
    coefficients = hat_coefficients(15, SINE)
    assert coefficients.denominator == 15
    assert coefficients.row(1) == (3, -1, 0, 1)
    assert coefficients.row(2) == (-1, 0, -1, -3)
    assert coefficients.row(4) == (0, -1, 3, 1)
    assert coefficients.row(7) == (1, -3, 1, 0)
    assert coefficients.coefficient(2, 7) == (-3, 15)


def test_hat_coefficients_7_cosine():
    coefficients = hat_coefficients(7, COSINE)
    assert coefficients.row(1) == (3, 2, 2)
    assert coefficients.denominator == 7


@mark.parametrize("n, kind", [(9, SINE), (4, COSINE), (12, COSINE), (18, SINE)])
def test_singular_inputs_are_rejected(n, kind):
    with raises(SingularMatrixError):
        hat_coefficients(n, kind)
    with raises(SingularMatrixError):
        explicit_inverse(n, kind)


def test_singular_error_names_the_square():
    with raises(SingularMatrixError, match="9 is divisible by 3²"):
        explicit_inverse(9, SINE)


def test_coefficients_follow_lambda_counts():
    for n in (15, 21, 30, 105):
        for kind in (SINE, COSINE):
            coefficients = hat_coefficients(n, kind)
            for l in coefficients.representatives.members:
                for m in coefficients.representatives.members:
                    plus, minus = lambda_count(m * l, n), lambda_count(-m * l, n)
                    expected = plus - minus if kind is SINE else plus + minus + rho(n)
                    assert coefficients.coefficient(l, m) == (expected, n)


def test_coefficient_bounds():
    for n in SQUAREFREE_UP_TO_200 + [4]:
        bound = sum(1 for q in divisors(n) if q >= 3)
        for kind in (SINE, COSINE):
            if not is_invertible(n, kind):
                continue
            numerators = np.array(hat_coefficients(n, kind).numerators)
            extra = 0 if kind is SINE else rho(n)
            assert np.all(np.abs(numerators) <= bound + extra)
            assert numerators.dtype.kind == "i"


def test_prime_sine_inverse_is_scaled_transpose():
    for p in (3, 5, 7, 11, 13):
        S = build_matrix(p, SINE).values
        assert np.max(np.abs(explicit_inverse(p, SINE).values - S.T / p)) < 1e-12


def test_small_inverses():
    assert explicit_inverse(3, SINE).values[0, 0] == approx(1 / sqrt(3), abs=1e-15)
    assert explicit_inverse(4, SINE).values[0, 0] == approx(0.5, abs=1e-15)


def test_inverse_15_puts_a_hat_on_every_entry():
    inverse = explicit_inverse(15, SINE)
    matrix = build_matrix(15, SINE)
    hats = dict(zip((1, 2, 4, 7), hat_values(15, SINE)))
    for inv_row, row in zip(inverse.entries, matrix.entries):
        for hatted, plain in zip(inv_row, row):
            assert hatted.hat and not plain.hat
            assert (hatted.sign, hatted.index) == (plain.sign, plain.index)
            assert hatted.value == approx(plain.sign * hats[plain.index], abs=1e-15)
    # ŝ_1 = (3 s_1 - s_2 + s_7)/15
    assert hats[1] == approx((3 * s(1, 15) - s(2, 15) + s(7, 15)) / 15, abs=1e-15)
    assert np.max(np.abs(matrix.values @ inverse.values - np.eye(4))) < 1e-12


@mark.parametrize("kind", [SINE, COSINE])
def test_reconstruction_up_to_200(kind):
    for n in range(3, 201):
        if not is_invertible(n, kind):
            continue
        M = build_matrix(n, kind).values
        inverse = explicit_inverse(n, kind).values
        eye = np.eye(len(M))
        assert np.max(np.abs(M @ inverse - eye)) < 1e-8, n
        assert np.max(np.abs(inverse @ M - eye)) < 1e-8, n


def test_hat_value_symmetries():
    assert hat_value(14, 15, SINE) == -hat_value(1, 15, SINE)
    assert hat_value(13, 15, COSINE) == hat_value(2, 15, COSINE)
    assert hat_value(1, 7, SINE) == approx(s(1, 7) / 7, abs=1e-15)


def test_hat_value_domain():
    with raises(DomainError):
        hat_value(3, 15, SINE)
    with raises(SingularMatrixError):
        hat_value(1, 9, SINE)


@given(integers(min_value=3, max_value=120), integers(min_value=-5000, max_value=5000))
def test_hat_value_matches_defining_sum(n, k):
    if gcd(k, n) != 1:
        return
    R = representative_set(n).members
    for kind in (SINE, COSINE):
        if not is_invertible(n, kind):
            continue
        if kind is SINE:
            direct = sum((lambda_count(l * k, n) - lambda_count(-l * k, n)) * s(l, n) for l in R) / n
            assert hat_value(-k, n, kind) == approx(-hat_value(k, n, kind), abs=1e-12)
        else:
            direct = sum(
                (lambda_count(l * k, n) + lambda_count(-l * k, n) + rho(n)) * 2 * cos(2 * pi * l / n) for l in R
            ) / n
            assert hat_value(-k, n, kind) == approx(hat_value(k, n, kind), abs=1e-12)
        assert hat_value(k, n, kind) == approx(direct, abs=1e-9)

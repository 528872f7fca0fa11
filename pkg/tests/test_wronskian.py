from fractions import Fraction

import pytest

from jetframes.algebra import Polynomial, coord, determinant, jet
from jetframes.jetspace import JetContext, iterated_total_derivative
from jetframes.wronskian import (
    VARIANT_CLASSICAL,
    VARIANT_POWER,
    classical_wronskian,
    cramer_coefficients,
    cramer_system_residuals,
    excluded_exponents,
    power_jet_matrix,
    power_wronskian,
    power_wronskian_closed_form,
    power_wronskian_identity_holds,
)
from jetframes.algebra import enumerate_exponents


def test_power_wronskian_n1():
    ctx = JetContext(1, 2)
    assert power_wronskian(1, ctx) == Polynomial.var(jet(1, 1))


def test_power_wronskian_n2():
    ctx = JetContext(2, 3)
    assert power_wronskian(1, ctx) == 2 * Polynomial.var(jet(1, 1)) ** 3
    assert power_wronskian(2, ctx) == 2 * Polynomial.var(jet(2, 1)) ** 3


def test_power_wronskian_n3_direct_expansion():
    ctx = JetContext(3, 4)
    # independent 3x3 cofactor expansion of the explicit matrix
    m = power_jet_matrix(1, ctx)
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    assert det == 12 * Polynomial.var(jet(1, 1)) ** 6
    assert power_wronskian(1, ctx) == det


def test_identity_check_range():
    for n in range(1, 5):
        assert power_wronskian_identity_holds(n)


def test_identity_n4_constant():
    ctx = JetContext(4, 5)
    expected = Polynomial.monomial([(jet(2, 1), 10)], 288)  # 1!2!3!4! = 288
    assert power_wronskian(2, ctx) == expected
    assert power_wronskian_closed_form(2, ctx) == expected


def test_classical_wronskian_small():
    assert classical_wronskian(JetContext(1, 2)) == Polynomial.var(jet(1, 1))
    ctx = JetContext(2, 3)
    w = classical_wronskian(ctx)
    z1p, z2p = Polynomial.var(jet(1, 1)), Polynomial.var(jet(2, 1))
    z1pp, z2pp = Polynomial.var(jet(1, 2)), Polynomial.var(jet(2, 2))
    assert w == z1p * z2pp - z2p * z1pp
    ident = {jet(1, 1): Fraction(1), jet(2, 1): Fraction(0), jet(1, 2): Fraction(0), jet(2, 2): Fraction(1)}
    assert w.evaluate(ident) == 1


def test_classical_wronskian_vanishes_on_zero_row():
    for n in (2, 3):
        ctx = JetContext(n, n + 1)
        w = classical_wronskian(ctx)
        for row in range(1, n + 1):
            killed = w.subs({jet(row, lam): 0 for lam in range(1, n + 1)})
            assert killed.is_zero()


def admissible(variant, ctx, chart=None):
    excl = excluded_exponents(variant, ctx, chart)
    return [a for a in enumerate_exponents(ctx.nvars, ctx.n) if a not in excl]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cramer_solution_satisfies_system_variant1(n):
    ctx = JetContext(n, n + 1)
    for chart in (1, ctx.nvars):
        for alpha in admissible(VARIANT_POWER, ctx, chart):
            coeffs = cramer_coefficients(VARIANT_POWER, alpha, ctx, chart)
            assert all(r.is_zero() for r in cramer_system_residuals(coeffs, ctx))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cramer_solution_satisfies_system_variant2(n):
    ctx = JetContext(n, n + 1)
    for alpha in admissible(VARIANT_CLASSICAL, ctx):
        coeffs = cramer_coefficients(VARIANT_CLASSICAL, alpha, ctx)
        assert all(r.is_zero() for r in cramer_system_residuals(coeffs, ctx))


def test_cramer_against_hand_2x2_oracle():
    # variant 1, n=2, alpha = e_j with j != chart: solve the 2x2 system by the
    # textbook ad-bc formulas, independently of the determinant routine
    ctx = JetContext(2, 3)
    chart = 1
    alpha = (0, 1, 0)
    coeffs = cramer_coefficients(VARIANT_POWER, alpha, ctx, chart)
    m = power_jet_matrix(chart, ctx)
    za = ctx.monomial_z(alpha)
    r1 = iterated_total_derivative(za, 1, ctx)
    r2 = iterated_total_derivative(za, 2, ctx)
    b1 = r1 * m[1][1] - r2 * m[0][1]
    b2 = m[0][0] * r2 - m[1][0] * r1
    assert coeffs.b[1] == b1
    assert coeffs.b[2] == b2


def test_cramer_variant2_substitute_back():
    ctx = JetContext(2, 3)
    alpha = (1, 1, 0)  # z^alpha = z1 z2
    coeffs = cramer_coefficients(VARIANT_CLASSICAL, alpha, ctx)
    assert all(r.is_zero() for r in cramer_system_residuals(coeffs, ctx))
    assert coeffs.scale == classical_wronskian(ctx)


def test_cramer_alternating_in_columns():
    # swapping two defining columns of the replaced matrix flips the sign
    ctx = JetContext(3, 4)
    chart = 1
    alpha = (0, 1, 1, 0)
    za = ctx.monomial_z(alpha)
    column = [iterated_total_derivative(za, kappa, ctx) for kappa in (1, 2, 3)]
    m = power_jet_matrix(chart, ctx)
    replaced = [[column[k], row[1], row[2]] for k, row in enumerate(m)]
    swapped = [[row[1], column[k], row[2]] for k, row in enumerate(m)]
    assert determinant(replaced) == -determinant(swapped)


def test_cramer_depends_only_on_coordinates_and_jets():
    from jetframes.algebra import COORD, JET

    ctx = JetContext(2, 3)
    for variant, chart in ((VARIANT_POWER, 2), (VARIANT_CLASSICAL, None)):
        for alpha in admissible(variant, ctx, chart):
            coeffs = cramer_coefficients(variant, alpha, ctx, chart)
            for b in coeffs.b:
                assert all(v[0] in (COORD, JET) for v in b.variables())


def test_cramer_rejects_solved_slots():
    ctx = JetContext(2, 3)
    with pytest.raises(ValueError):
        cramer_coefficients(VARIANT_POWER, (1, 0, 0), ctx, chart=1)
    with pytest.raises(ValueError):
        cramer_coefficients(VARIANT_CLASSICAL, (0, 1, 0), ctx)
    with pytest.raises(ValueError):
        cramer_coefficients(VARIANT_POWER, (2, 1, 0), ctx, chart=1)  # |alpha| > n

from __future__ import annotations

from fractions import Fraction

import pytest

from qqfusion.cartan import build_cartan
from qqfusion.qsystem import (
    check_linear_recursion_A1,
    check_minus_one,
    check_residuals,
    check_same_seed_commutation,
    check_translation_A1,
    classical_specialization,
    evaluate_classical,
    shared_table,
    solve,
)
from qqfusion.qtorus import TorusElement, monomial_inverse, product
from qqfusion.scalars import TPoly

A1 = build_cartan("A", 1)
A2 = build_cartan("A", 2)
D4 = build_cartan("D", 4)


def t(e):
    return TPoly.monomial(e)


def test_a1_second_level():
    table = solve(A1, 2)
    expected = TorusElement(A1, {(-1, 2): t(1), (-1, 0): -t(-1)})
    assert table[(1, 2)] == expected
    assert str(table[(1, 2)]) == "t*Q[1,0]^-1*Q[1,1]^2 - t^{-1}*Q[1,0]^-1"


def test_a1_minus_one():
    table = solve(A1, 1)
    assert str(table[(1, -1)]) == "t*Q[1,0]^2*Q[1,1]^-1 - t^{-1}*Q[1,1]^-1"


def test_a1_third_level_from_linear_recursion():
    # Q[3] = (Q[1] Q[0]^-1 + t Q[-1] Q[0]^-1) Q[2] - t Q[1], written out independently
    table = solve(A1, 3)
    g0, g1 = TorusElement.generator(A1, 1, 0), TorusElement.generator(A1, 1, 1)
    inv0 = monomial_inverse(g0)
    op = product(g1, inv0) + product(table[(1, -1)], inv0).shift_t(2)
    assert table[(1, 3)] == product(op, table[(1, 2)]) - g1.shift_t(2)


def test_a2_second_level():
    table = solve(A2, 2)
    assert str(table[(1, 2)]) == "t^{2}*Q[1,0]^-1*Q[1,1]^2 - t^{-1}*Q[1,0]^-1*Q[2,1]"
    assert str(table[(2, 2)]) == "-t^{-1}*Q[2,0]^-1*Q[1,1] + t^{2}*Q[2,0]^-1*Q[2,1]^2"


@pytest.mark.parametrize("cartan,n_max", [(A1, 5), (A2, 4), (D4, 3)])
def test_structural_checks(cartan, n_max):
    table = solve(cartan, n_max)
    for report in (check_residuals(table), check_same_seed_commutation(table), check_minus_one(table)):
        assert report.ok, str(report)
        assert report.checked > 0


def test_a1_only_checks():
    table = solve(A1, 5)
    assert check_linear_recursion_A1(table).ok
    assert check_translation_A1(table).ok
    with pytest.raises(ValueError):
        check_linear_recursion_A1(solve(A2, 2))
    with pytest.raises(ValueError):
        check_translation_A1(solve(A2, 2))


def test_classical_a1_values():
    images = classical_specialization(solve(A1, 4))
    # seed Q[0] = 1, Q[1] = 2 gives the dimensions of the spin-n/2 representations
    assert [evaluate_classical(images[(1, n)], (1, 2)) for n in range(-1, 5)] == [0, 1, 2, 3, 4, 5]
    assert [evaluate_classical(images[(1, n)], (1, 1)) for n in range(0, 5)] == [1, 1, 0, -1, -1]


def test_classical_a2_characters():
    images = classical_specialization(solve(A2, 3))
    # dimensions of the KR modules for sl3 with Q[a,0] = 1 and Q[a,1] = 3
    vals = {key: evaluate_classical(images[key], (1, 1, 3, 3)) for key in images}
    assert vals[(1, 2)] == 6 and vals[(2, 2)] == 6
    assert vals[(1, 3)] == 10


def test_classical_nonunit_seed():
    images = classical_specialization(solve(A1, 3))
    # Q[2] = (Q1^2 - 1)/Q0 at Q0 = 1/2, Q1 = 3
    assert evaluate_classical(images[(1, 2)], (Fraction(1, 2), 3)) == 16


def test_laurent_property_holds():
    # every entry has integer coefficients on a finite support
    table = solve(D4, 3)
    for value in table.entries.values():
        for coeff in value.raw_terms.values():
            assert all(isinstance(c, int) for c in coeff.values())


def test_table_extends_on_demand():
    table = solve(A1, 2)
    assert table.n_max == 2
    table[(1, 4)]
    assert table.n_max == 4
    with pytest.raises(KeyError):
        table[(1, -2)]
    with pytest.raises(ValueError):
        solve(A1, 0)


def test_shared_table_reused():
    a = shared_table(A1, 2)
    b = shared_table(A1, 3)
    assert a is b and b.n_max >= 3

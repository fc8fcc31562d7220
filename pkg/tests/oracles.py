"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from math import prod

import sympy

from qqfusion.cartan import FusionInput, build_cartan, q_vectors
from qqfusion.scalars import LaurentPoly, QPoly

q_sym = sympy.Symbol("q")


def sympy_to_laurent(expr, var=q_sym, name="q") -> LaurentPoly:
    """Exact Laurent polynomial from a sympy rational expression whose denominator is a monomial."""
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    den_poly = sympy.Poly(den, var)
    assert len(den_poly.terms()) == 1, f"not a Laurent polynomial: {expr}"
    ((shift,), dc), = den_poly.terms()
    terms = {}
    for (e,), c in sympy.Poly(num, var).terms():
        value = sympy.Rational(c, dc)
        assert value.q == 1
        terms[e - shift] = int(value)
    return LaurentPoly(terms, var=name)


def qbinomial_series(m: int, p: int) -> LaurentPoly:
    """Coefficient of ``x^m`` in ``(q^(p+1) x; q)_inf / (x; q)_inf`` via the q-binomial theorem.

    ``(a; q)_m / (q; q)_m`` with ``a = q^(p+1)``, simplified by sympy.
    """
    num = prod((1 - q_sym ** (p + 1 + j) for j in range(m)), start=sympy.Integer(1))
    den = prod((1 - q_sym ** (j + 1) for j in range(m)), start=sympy.Integer(1))
    return sympy_to_laurent(num / den)


def qbinomial_power_series(m: int, p: int) -> LaurentPoly:
    """For ``p >= 0``: multiply truncated geometric series ``sum_s q^(i s) x^s`` for ``i = 0..p``."""
    assert p >= 0
    # poly in x with coefficients dict q-exp -> int
    series = [{0: 1}] + [{} for _ in range(m)]
    for i in range(p + 1):
        new = [dict() for _ in range(m + 1)]
        for deg, coeffs in enumerate(series):
            for s in range(0, m + 1 - deg):
                for e, c in coeffs.items():
                    new[deg + s][e + i * s] = new[deg + s].get(e + i * s, 0) + c
        series = new
    return LaurentPoly(series[m], var="q")


def gaussian_sympy(n: int, k: int):
    if k < 0 or k > n:
        return sympy.Integer(0)
    num = prod((1 - q_sym ** (n - i) for i in range(k)), start=sympy.Integer(1))
    den = prod((1 - q_sym ** (i + 1) for i in range(k)), start=sympy.Integer(1))
    return sympy.cancel(num / den)


def hook_formula_v(n: int, ell: int) -> QPoly:
    """A1 multiplicity of ``V_ell`` in ``n`` copies of the fundamental module, in ``v``."""
    j = (n - ell) // 2
    expr = q_sym ** (-j * (n - j + 1)) * (gaussian_sympy(n, j) - gaussian_sympy(n, j - 1))
    lp = sympy_to_laurent(expr)
    return QPoly({-e: c for e, c in lp.raw_terms.items()})


def hook_product_form_v(n: int, ell: int) -> QPoly:
    """Same quantity from the product (hook-length) form."""
    j = (n - ell) // 2

    def qp(lo, hi, shift=0):
        return prod((1 - q_sym ** (i + shift) for i in range(lo, hi + 1)), start=sympy.Integer(1))

    expr = q_sym ** (-j * (n - j)) * qp(1, n) / (qp(1, j) * qp(1, n - 2 * j) * qp(n - 2 * j + 1, n - j, 1))
    lp = sympy_to_laurent(expr)
    return QPoly({-e: c for e, c in lp.raw_terms.items()})


def clebsch_gordan_A1(levels: list[int]) -> dict[int, int]:
    """Multiplicities in the tensor product of irreducible sl2 modules of highest weights ``levels``."""
    current = {0: 1}
    for i in levels:
        nxt: dict[int, int] = {}
        for lam, mult in current.items():
            for out in range(abs(lam - i), lam + i + 1, 2):
                nxt[out] = nxt.get(out, 0) + mult
        current = nxt
    return current


def weyl_dimension_A(ell) -> int:
    """Dimension of the irreducible ``sl_{r+1}`` module with Dynkin labels ``ell``."""
    r = len(ell)
    num = Fraction(1)
    for i in range(1, r + 1):
        for j in range(i + 1, r + 2):
            num *= Fraction(sum(ell[i - 1 : j - 1]) + j - i, j - i)
    assert num.denominator == 1
    return int(num)


def brute_force_m(fi: FusionInput, ell, k: int, box: int):
    """Every ``m`` in ``[0, box]^(r x k)`` with ``q0 = 0``."""
    r = fi.cartan.rank
    out = []
    for flat in itertools.product(range(box + 1), repeat=r * k):
        m = [list(flat[a * k : (a + 1) * k]) for a in range(r)]
        q0, _q, _p = q_vectors(fi, m, k=k, ell=ell)
        if all(x == 0 for x in q0):
            out.append(m)
    return out


def random_input(rng: random.Random, label: str, rank: int, max_weighted: int) -> FusionInput:
    """Random KR product with ``sum_(a,i) i * n[a,i] <= max_weighted``."""
    cartan = build_cartan(label, rank)
    budget = rng.randint(0, max_weighted)
    counts: dict[tuple[int, int], int] = {}
    while budget > 0:
        i = rng.randint(1, budget)
        a = rng.randint(1, rank)
        counts[(a, i)] = counts.get((a, i), 0) + 1
        budget -= i
    return FusionInput.from_mapping(cartan, counts)


def random_suite(seed: int = 20240611) -> list[FusionInput]:
    """The randomized M = N / route-equivalence suite."""
    rng = random.Random(seed)
    suite = [random_input(rng, "A", 1, 8) for _ in range(50)]
    suite += [random_input(rng, "A", 2, 6) for _ in range(30)]
    suite += [random_input(rng, "A", 3, 6) for _ in range(30)]
    suite += [random_input(rng, "D", 4, 4) for _ in range(10)]
    return suite


def kr_dimension_A(rank: int, alpha: int, level: int) -> int:
    ell = [0] * rank
    ell[alpha - 1] = level
    return weyl_dimension_A(ell)



def random_contract_element(rng: random.Random, table, max_level: int = 2, max_terms: int = 2, max_factors: int = 2):
    """Random element of the algebra generated by ``Q[a,0]^(+-1)`` and ``Q[a,i]``, ``i >= 1``.

    A sum of short words, each prefixed by a power of one ``Q[a,0]``, with small
    integer-power-of-t coefficients.
    """
    from qqfusion.qtorus import TorusElement, monomial_inverse, product_all
    from qqfusion.scalars import TPoly

    c = table.cartan
    total = TorusElement.zero(c)
    for _ in range(rng.randint(1, max_terms)):
        a = rng.randint(1, c.rank)
        g0 = table[(a, 0)]
        power = rng.randint(-1, 1)
        factors = [monomial_inverse(g0)] if power < 0 else [g0] * power
        for _ in range(rng.randint(0, max_factors)):
            factors.append(table[(rng.randint(1, c.rank), rng.randint(1, max_level))])
        coeff = TPoly.monomial(rng.randint(-2, 2), rng.choice([1, -1, 2]))
        total = total + product_all(factors, c) * coeff
    return total

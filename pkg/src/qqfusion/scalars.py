"""Exact scalar rings: Laurent polynomials over the integers.

``LaurentPoly`` carries a variable name and integer exponents; ``QPoly`` is the
reporting ring in ``v = q^-1``; ``TPoly`` lives in ``Z[t^(1/2), t^(-1/2)]`` and
stores every exponent doubled so that half-integer powers stay integral.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]


class LaurentPoly:
    """Sparse Laurent polynomial with integer coefficients.

    Immutable: arithmetic returns new objects.  Zero coefficients are never
    stored, so structural equality is polynomial equality.
    """

    __slots__ = ("_terms", "var", "_hash")

    #: stored exponent = _scale * true exponent
    _scale = 1

    def __init__(self, terms: Union[Mapping[int, int], Iterable[tuple[int, int]], None] = None, var: str = "q"):
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        acc: dict[int, int] = {}
        for e, c in items:
            if c:
                acc[e] = acc.get(e, 0) + c
        self._terms = {e: c for e, c in acc.items() if c}
        self.var = var
        self._hash = None

    # construction helpers -------------------------------------------------

    def _like(self, terms: dict[int, int]) -> "LaurentPoly":
        out = object.__new__(type(self))
        out._terms = terms
        out.var = self.var
        out._hash = None
        return out

    @classmethod
    def monomial(cls, exp: Number = 0, coeff: int = 1, var: str = "q") -> "LaurentPoly":
        return cls({cls._key(exp): coeff}, var=var)

    @classmethod
    def constant(cls, c: int, var: str = "q") -> "LaurentPoly":
        return cls.monomial(0, c, var=var)

    @classmethod
    def _key(cls, exp: Number) -> int:
        k = Fraction(exp) * cls._scale
        if k.denominator != 1:
            raise ValueError(f"exponent {exp} not representable in {cls.__name__}")
        return int(k)

    # accessors -----------------------------------------------------------

    @property
    def raw_terms(self) -> dict[int, int]:
        """Stored-exponent -> coefficient (a copy)."""
        return dict(self._terms)

    @property
    def terms(self) -> dict[Number, int]:
        """True exponent -> coefficient."""
        if self._scale == 1:
            return dict(self._terms)
        return {_frac_or_int(Fraction(e, self._scale)): c for e, c in self._terms.items()}

    def coeff(self, exp: Number) -> int:
        return self._terms.get(self._key(exp), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def min_exp(self) -> Number:
        return _frac_or_int(Fraction(min(self._terms), self._scale))

    def max_exp(self) -> Number:
        return _frac_or_int(Fraction(max(self._terms), self._scale))

    def at_one(self) -> int:
        return sum(self._terms.values())

    def as_monomial(self):
        """``(exp, coeff)`` if this is a single term, else ``None``."""
        if len(self._terms) != 1:
            return None
        (e, c), = self._terms.items()
        return _frac_or_int(Fraction(e, self._scale)), c

    # arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return self._like({0: other} if other else {})
        if type(other) is not type(self) or other.var != self.var:
            raise TypeError(f"cannot combine {self!r} with {other!r}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return self._like({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            mono = self.as_monomial()
            if mono is None or abs(mono[1]) != 1:
                raise ValueError("only unit monomials can be inverted")
            return self._like({-self._key(mono[0]) * (-n): mono[1] ** (-n)})
        out = self._like({0: 1})
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, exp: Number) -> "LaurentPoly":
        """Multiply by ``var^exp``."""
        k = self._key(exp)
        return self._like({e + k: c for e, c in self._terms.items()})

    def divide_exact(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact quotient; raises ``ArithmeticError`` when ``other`` does not divide."""
        other = self._coerce(other)
        if not other._terms:
            raise ZeroDivisionError("division by zero polynomial")
        rem = dict(self._terms)
        dtop = max(other._terms)
        dlow = min(other._terms)
        lead = other._terms[dtop]
        quot: dict[int, int] = {}
        floor = (min(rem) - dlow) if rem else 0
        while rem:
            top = max(rem)
            qe = top - dtop
            if qe < floor:
                raise ArithmeticError("inexact division")
            qc, r = divmod(rem[top], lead)
            if r:
                raise ArithmeticError("inexact division")
            quot[qe] = qc
            for e, c in other._terms.items():
                s = rem.get(qe + e, 0) - qc * c
                if s:
                    rem[qe + e] = s
                else:
                    rem.pop(qe + e, None)
        return self._like(quot)

    def map_exponents(self, fn, cls=None, var=None) -> "LaurentPoly":
        """Apply ``fn`` to every stored exponent, optionally changing ring."""
        cls = cls or type(self)
        out = object.__new__(cls)
        acc: dict[int, int] = {}
        for e, c in self._terms.items():
            k = fn(e)
            acc[k] = acc.get(k, 0) + c
        out._terms = {e: c for e, c in acc.items() if c}
        out.var = var if var is not None else self.var
        out._hash = None
        return out

    # comparison / display ------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            return self._terms == ({0: other} if other else {})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return type(self) is type(other) and self.var == other.var and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.var, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    def _fmt_exp(self, e: int) -> str:
        x = Fraction(e, self._scale)
        if x.denominator == 1:
            return str(x.numerator)
        return f"({x})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms):
            c = self._terms[e]
            if e == 0:
                mono = ""
            elif e == self._scale:
                mono = self.var
            else:
                mono = f"{self.var}^{self._fmt_exp(e)}"
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)


class QPoly(LaurentPoly):
    """Polynomial in ``v = q^-1``; the reporting ring for graded multiplicities."""

    __slots__ = ()

    def __init__(self, terms=None, var: str = "v"):
        super().__init__(terms, var=var)

    @classmethod
    def monomial(cls, exp: Number = 0, coeff: int = 1, var: str = "v") -> "QPoly":
        return cls({cls._key(exp): coeff}, var=var)

    @classmethod
    def constant(cls, c: int, var: str = "v") -> "QPoly":
        return cls.monomial(0, c, var=var)

    def is_graded_multiplicity(self) -> bool:
        return all(e >= 0 and c > 0 for e, c in self._terms.items())


class TPoly(LaurentPoly):
    """Laurent polynomial in ``t^(1/2)``; exponents are stored doubled."""

    __slots__ = ()
    _scale = 2

    def __init__(self, terms=None, var: str = "t"):
        super().__init__(terms, var=var)

    @classmethod
    def monomial(cls, exp: Number = 0, coeff: int = 1, var: str = "t") -> "TPoly":
        return cls({cls._key(exp): coeff}, var=var)

    @classmethod
    def constant(cls, c: int, var: str = "t") -> "TPoly":
        return cls.monomial(0, c, var=var)

    @classmethod
    def from_doubled(cls, terms: Mapping[int, int]) -> "TPoly":
        return cls(terms)


def _frac_or_int(x: Fraction) -> Number:
    return x.numerator if x.denominator == 1 else x


def q_poly(terms: Mapping[int, int]) -> LaurentPoly:
    return LaurentPoly(terms, var="q")


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int) -> LaurentPoly:
    """``[n choose k]_q`` for ``0 <= k <= n``, zero otherwise."""
    if k < 0 or n < 0 or k > n:
        return q_poly({})
    if k == 0 or k == n:
        return q_poly({0: 1})
    # [n, k] = [n-1, k-1] + q^k [n-1, k]
    return gaussian_binomial(n - 1, k - 1) + gaussian_binomial(n - 1, k).shift(k)


@lru_cache(maxsize=None)
def qbinomial(m: int, p: int) -> LaurentPoly:
    """``[m + p, m]_q = (q^(p+1); q)_m / (q; q)_m``.

    Equivalently the coefficient of ``x^m`` in ``(q^(p+1) x; q)_inf / (x; q)_inf``:
    ``prod_{i=0}^{p} (1 - q^i x)^-1`` for ``p >= 0`` and
    ``prod_{i=0}^{-p-2} (1 - q^(i+p+1) x)`` for ``p < 0``.  In particular it
    vanishes for ``p < 0`` and ``m >= -p``.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if p >= 0:
        return gaussian_binomial(m + p, m)
    width = -p - 1
    if m > width:
        return q_poly({})
    # (-1)^m e_m(q^(p+1), ..., q^-1) = (-1)^m q^(m p + m(m+1)/2) [width, m]_q
    g = gaussian_binomial(width, m).shift(m * p + m * (m + 1) // 2)
    return -g if m % 2 else g


def embed_q(qp: LaurentPoly, delta: int) -> TPoly:
    """Substitute ``q = t^-delta``."""
    if delta < 1:
        raise ValueError("delta must be positive")
    if qp.var != "q" or type(qp) is not LaurentPoly:
        raise TypeError("expected a polynomial in q")
    return qp.map_exponents(lambda e: -2 * delta * e, cls=TPoly, var="t")


def q_to_v(qp: LaurentPoly) -> QPoly:
    """Rewrite a polynomial in ``q`` in the variable ``v = q^-1``."""
    return qp.map_exponents(lambda e: -e, cls=QPoly, var="v")


def v_to_t(vp: QPoly, delta: int) -> TPoly:
    """``v = q^-1 = t^delta``."""
    return vp.map_exponents(lambda e: 2 * delta * e, cls=TPoly, var="t")


class TheoremViolation(ArithmeticError):
    """An identity guaranteed by the theory failed; indicates a bug."""


def extract_v(tp: TPoly, delta: int) -> QPoly:
    """Rewrite a ``t``-polynomial whose exponents are multiples of ``delta`` in ``v = t^delta``."""
    step = 2 * delta
    bad = [e for e in tp.raw_terms if e % step]
    if bad:
        raise TheoremViolation(f"t-exponents {sorted(Fraction(e, 2) for e in bad)} not divisible by delta={delta} in {tp}")
    return tp.map_exponents(lambda e: e // step, cls=QPoly, var="v")

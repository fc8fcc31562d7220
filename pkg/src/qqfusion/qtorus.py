"""Non-commutative Laurent polynomials in the seed generators Q[alpha,0], Q[alpha,1].

Generators obey ``Q[a,0] Q[b,1] = t^lam[a][b] Q[b,1] Q[a,0]`` and same-level
generators commute.  An element is stored in normal order: every monomial is
``c(t) * prod_a Q[a,0]^x_a * prod_a Q[a,1]^y_a`` with the level-0 block first.

Internally a term is keyed by the flat exponent tuple ``(x_1..x_r, y_1..y_r)``
and carries a raw coefficient dict ``{doubled t-exponent: int}``.
"""

from __future__ import annotations

import heapq
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .cartan import CartanData
from .scalars import TPoly, TheoremViolation

ExpVec = tuple[int, ...]
Coeff = dict[int, int]


# raw coefficient helpers (doubled exponents) ---------------------------------

def _cmul(x: Coeff, y: Coeff, shift: int = 0) -> Coeff:
    if len(x) == 1 and len(y) == 1:
        (e1, c1), = x.items()
        (e2, c2), = y.items()
        return {e1 + e2 + shift: c1 * c2}
    out: Coeff = {}
    for e1, c1 in x.items():
        e1 += shift
        for e2, c2 in y.items():
            e = e1 + e2
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _cadd_into(acc: Coeff, x: Coeff, sign: int = 1) -> None:
    for e, c in x.items():
        s = acc.get(e, 0) + sign * c
        if s:
            acc[e] = s
        else:
            del acc[e]


def _cdiv(num: Coeff, den: Coeff) -> Coeff:
    if len(den) == 1:
        (de, dc), = den.items()
        out = {}
        for e, c in num.items():
            q, r = divmod(c, dc)
            if r:
                raise ArithmeticError("inexact coefficient division")
            out[e - de] = q
        return out
    return TPoly(num).divide_exact(TPoly(den)).raw_terms


class TorusElement:
    """Normal-ordered element of the quantum torus over a fixed Cartan datum."""

    __slots__ = ("cartan", "_terms")

    def __init__(self, cartan: CartanData, terms: Optional[Mapping[ExpVec, TPoly | Coeff | int]] = None):
        self.cartan = cartan
        out: dict[ExpVec, Coeff] = {}
        for key, val in (terms or {}).items():
            key = tuple(key)
            if len(key) != 2 * cartan.rank:
                raise ValueError(f"exponent vector must have length {2 * cartan.rank}")
            if isinstance(val, TPoly):
                raw = val.raw_terms
            elif isinstance(val, int):
                raw = {0: val} if val else {}
            else:
                raw = {e: c for e, c in val.items() if c}
            if raw:
                prev = out.get(key)
                if prev is None:
                    out[key] = dict(raw)
                else:
                    _cadd_into(prev, raw)
                    if not prev:
                        del out[key]
        self._terms = out

    @classmethod
    def _raw(cls, cartan: CartanData, terms: dict[ExpVec, Coeff]) -> "TorusElement":
        obj = object.__new__(cls)
        obj.cartan = cartan
        obj._terms = terms
        return obj

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, cartan: CartanData) -> "TorusElement":
        return cls._raw(cartan, {})

    @classmethod
    def scalar(cls, cartan: CartanData, c: TPoly | int) -> "TorusElement":
        return cls(cartan, {(0,) * (2 * cartan.rank): c})

    @classmethod
    def monomial(cls, cartan: CartanData, a: Sequence[int], b: Sequence[int], c: TPoly | int = 1) -> "TorusElement":
        return cls(cartan, {tuple(a) + tuple(b): c})

    @classmethod
    def generator(cls, cartan: CartanData, alpha: int, level: int) -> "TorusElement":
        """``Q[alpha, level]`` for 1-based ``alpha`` and ``level`` in {0, 1}."""
        if level not in (0, 1) or not 1 <= alpha <= cartan.rank:
            raise ValueError("generators are Q[alpha,0] and Q[alpha,1] with 1 <= alpha <= rank")
        e = [0] * (2 * cartan.rank)
        e[level * cartan.rank + alpha - 1] = 1
        return cls._raw(cartan, {tuple(e): {0: 1}})

    # accessors ------------------------------------------------------------

    @property
    def rank(self) -> int:
        return self.cartan.rank

    @property
    def terms(self) -> dict[ExpVec, TPoly]:
        return {k: TPoly(v) for k, v in self._terms.items()}

    @property
    def raw_terms(self) -> dict[ExpVec, Coeff]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def split(self, key: ExpVec) -> tuple[ExpVec, ExpVec]:
        r = self.rank
        return key[:r], key[r:]

    def coefficient(self, a: Sequence[int], b: Sequence[int]) -> TPoly:
        return TPoly(self._terms.get(tuple(a) + tuple(b), {}))

    def as_monomial(self) -> Optional[tuple[ExpVec, Coeff]]:
        if len(self._terms) != 1:
            return None
        (k, v), = self._terms.items()
        return k, v

    def term_count(self) -> int:
        """Number of (monomial, t-power) pairs; a size measure."""
        return sum(len(v) for v in self._terms.values())

    # arithmetic -----------------------------------------------------------

    def _check(self, other: "TorusElement") -> None:
        if other.cartan != self.cartan:
            raise ValueError(f"mixed algebras {self.cartan.name} and {other.cartan.name}")

    def _coerce(self, other) -> "TorusElement":
        if isinstance(other, (int, TPoly)):
            return TorusElement.scalar(self.cartan, other)
        if not isinstance(other, TorusElement):
            raise TypeError(f"cannot combine TorusElement with {type(other).__name__}")
        self._check(other)
        return other

    def __add__(self, other) -> "TorusElement":
        other = self._coerce(other)
        out = {k: dict(v) for k, v in self._terms.items()}
        for k, v in other._terms.items():
            if k in out:
                _cadd_into(out[k], v)
                if not out[k]:
                    del out[k]
            else:
                out[k] = dict(v)
        return TorusElement._raw(self.cartan, out)

    __radd__ = __add__

    def __neg__(self) -> "TorusElement":
        return TorusElement._raw(self.cartan, {k: {e: -c for e, c in v.items()} for k, v in self._terms.items()})

    def __sub__(self, other) -> "TorusElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TorusElement":
        return (-self) + other

    def __mul__(self, other) -> "TorusElement":
        if isinstance(other, (int, TPoly)):
            raw = other.raw_terms if isinstance(other, TPoly) else ({0: other} if other else {})
            out = {}
            for k, v in self._terms.items():
                c = _cmul(v, raw)
                if c:
                    out[k] = c
            return TorusElement._raw(self.cartan, out)
        return product(self, other)

    def __rmul__(self, other) -> "TorusElement":
        if isinstance(other, (int, TPoly)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int) -> "TorusElement":
        if n < 0:
            return monomial_inverse(self) ** (-n)
        out = TorusElement.scalar(self.cartan, 1)
        base = self
        while n:
            if n & 1:
                out = product(out, base)
            n >>= 1
            if n:
                base = product(base, base)
        return out

    def shift_t(self, doubled: int) -> "TorusElement":
        """Multiply by ``t^(doubled/2)``."""
        return TorusElement._raw(
            self.cartan, {k: {e + doubled: c for e, c in v.items()} for k, v in self._terms.items()}
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, TPoly)):
            other = TorusElement.scalar(self.cartan, other)
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self.cartan == other.cartan and self._terms == other._terms

    def __hash__(self):
        return hash((self.cartan.name, frozenset((k, frozenset(v.items())) for k, v in self._terms.items())))

    # structural helpers --------------------------------------------------

    def filter(self, keep: Callable[[ExpVec, ExpVec], bool]) -> "TorusElement":
        """Keep the monomials whose ``(a, b)`` exponent blocks satisfy ``keep``."""
        r = self.rank
        return TorusElement._raw(
            self.cartan, {k: dict(v) for k, v in self._terms.items() if keep(k[:r], k[r:])}
        )

    def at_t_equals_one(self) -> dict[ExpVec, int]:
        """Commutative image: coefficients evaluated at ``t = 1``."""
        out = {}
        for k, v in self._terms.items():
            s = sum(v.values())
            if s:
                out[k] = s
        return out

    def __repr__(self) -> str:
        return f"TorusElement[{self.cartan.name}]({self})"

    def __str__(self) -> str:
        return render(self)


# products ---------------------------------------------------------------------

def mono_product(u: tuple[ExpVec, TPoly], w: tuple[ExpVec, TPoly], cartan: CartanData) -> tuple[ExpVec, TPoly]:
    """Product of two normal-ordered monomials ``(exponents, scalar)``."""
    r = cartan.rank
    (ku, cu), (kw, cw) = u, w
    bu, aw = ku[r:], kw[:r]
    lam = cartan.lam
    twist = sum(bu[i] * lam[i][j] * aw[j] for i in range(r) if bu[i] for j in range(r) if aw[j])
    key = tuple(x + y for x, y in zip(ku, kw))
    return key, (cu * cw).shift(-twist)


def product(x: TorusElement, y: TorusElement) -> TorusElement:
    """Bilinear extension of :func:`mono_product`."""
    x._check(y)
    cartan = x.cartan
    r = cartan.rank
    lam = cartan.lam
    if not x._terms or not y._terms:
        return TorusElement.zero(cartan)

    # b . lam for each left term; the twist is then a dot product with the right a-block
    left = []
    for k, v in x._terms.items():
        b = k[r:]
        bl = tuple(sum(b[i] * lam[i][j] for i in range(r)) for j in range(r))
        left.append((k, v, bl))
    right = [(k, v, k[:r]) for k, v in y._terms.items()]

    out: dict[ExpVec, Coeff] = {}
    rng = range(r)
    for kx, vx, bl in left:
        for ky, vy, ay in right:
            twist = 0
            for j in rng:
                if ay[j]:
                    twist += bl[j] * ay[j]
            key = tuple(p + q for p, q in zip(kx, ky))
            shift = -2 * twist
            acc = out.get(key)
            if acc is None:
                acc = out[key] = {}
            for e1, c1 in vx.items():
                e1 += shift
                for e2, c2 in vy.items():
                    e = e1 + e2
                    s = acc.get(e, 0) + c1 * c2
                    if s:
                        acc[e] = s
                    else:
                        del acc[e]
    return TorusElement._raw(cartan, {k: v for k, v in out.items() if v})


def product_all(factors: Iterable[TorusElement], cartan: CartanData) -> TorusElement:
    out = TorusElement.scalar(cartan, 1)
    for f in factors:
        out = product(out, f)
    return out


def monomial_inverse(x: TorusElement) -> TorusElement:
    """Two-sided inverse of a unit monomial ``+-t^e * Q^(a,b)``."""
    mono = x.as_monomial()
    if mono is None:
        raise ValueError("only single monomials are invertible")
    key, coeff = mono
    if len(coeff) != 1:
        raise ValueError("monomial scalar is not a unit of Z[t^(1/2), t^(-1/2)]")
    (e, c), = coeff.items()
    if c not in (1, -1):
        raise ValueError("monomial scalar is not a unit of Z[t^(1/2), t^(-1/2)]")
    r = x.rank
    a, b = key[:r], key[r:]
    lam = x.cartan.lam
    bla = sum(b[i] * lam[i][j] * a[j] for i in range(r) for j in range(r))
    return TorusElement._raw(x.cartan, {tuple(-z for z in key): {-e - 2 * bla: c}})


# division ---------------------------------------------------------------------

def right_divide_exact(P: TorusElement, D: TorusElement) -> TorusElement:
    """Return ``R`` with ``R * D == P``; raise :class:`TheoremViolation` otherwise.

    Lexicographic long division.  The lex-leading monomial of ``R * D`` is the
    product of the leading monomials, so each step peels off one quotient term
    and strictly lowers the remainder's leading exponent.  Every quotient
    exponent must stay above ``lexmin(P) - lexmin(D)``; crossing that bound
    means no exact quotient exists.
    """
    P._check(D)
    if not D._terms:
        raise ZeroDivisionError("division by zero torus element")
    cartan = P.cartan
    r = cartan.rank
    lam = cartan.lam
    if not P._terms:
        return TorusElement.zero(cartan)

    mono = D.as_monomial()
    if mono is not None and len(mono[1]) == 1 and next(iter(mono[1].values())) in (1, -1):
        return product(P, monomial_inverse(D))

    dkeys = list(D._terms)
    dlead = max(dkeys)
    dmin = min(dkeys)
    dlead_a = dlead[:r]
    dlead_c = D._terms[dlead]
    bound = tuple(p - d for p, d in zip(min(P._terms), dmin))

    # lam . a for each divisor term (twist = -(b_quot . lam . a_div))
    dterms = [(k, v, tuple(sum(lam[i][j] * k[j] for j in range(r)) for i in range(r))) for k, v in D._terms.items()]

    rem: dict[ExpVec, Coeff] = {k: dict(v) for k, v in P._terms.items()}
    heap = [tuple(-z for z in k) for k in rem]
    heapq.heapify(heap)
    quot: dict[ExpVec, Coeff] = {}

    while rem:
        while True:
            top = tuple(-z for z in heapq.heappop(heap))
            if top in rem:
                break
        qkey = tuple(x - y for x, y in zip(top, dlead))
        if qkey < bound:
            raise TheoremViolation("right division is not exact (Laurent property violated)")
        qb = qkey[r:]
        twist_lead = sum(qb[i] * sum(lam[i][j] * dlead_a[j] for j in range(r)) for i in range(r))
        # rem[top] = qc * dlead_c * t^(-twist_lead)
        try:
            qc = _cdiv(rem[top], {e - 2 * twist_lead: c for e, c in dlead_c.items()})
        except ArithmeticError as exc:
            raise TheoremViolation("right division is not exact (coefficient)") from exc
        quot[qkey] = qc
        for dk, dv, la in dterms:
            twist = sum(qb[i] * la[i] for i in range(r) if qb[i])
            key = tuple(x + y for x, y in zip(qkey, dk))
            sub = _cmul(qc, dv, -2 * twist)
            acc = rem.get(key)
            if acc is None:
                rem[key] = {e: -c for e, c in sub.items()}
                heapq.heappush(heap, tuple(-z for z in key))
            else:
                _cadd_into(acc, sub, -1)
                if not acc:
                    del rem[key]
    return TorusElement._raw(cartan, quot)


# substitution -----------------------------------------------------------------

def substitute(x: TorusElement, images: Mapping[tuple[int, int], TorusElement]) -> TorusElement:
    """Ring-map extension sending generator ``(alpha, level)`` to ``images[(alpha, level)]``.

    Missing generators map to themselves.  Negative powers need monomial images.
    """
    cartan = x.cartan
    r = cartan.rank
    gens = []
    for level in (0, 1):
        for alpha in range(1, r + 1):
            img = images.get((alpha, level))
            gens.append(img if img is not None else TorusElement.generator(cartan, alpha, level))
    power_cache: dict[tuple[int, int], TorusElement] = {}

    def power(idx: int, n: int) -> TorusElement:
        key = (idx, n)
        if key not in power_cache:
            power_cache[key] = gens[idx] ** n
        return power_cache[key]

    out = TorusElement.zero(cartan)
    for k, v in x._terms.items():
        term = TorusElement._raw(cartan, {(0,) * (2 * r): dict(v)})
        for idx, n in enumerate(k):
            if n:
                term = product(term, power(idx, n))
        out = out + term
    return out


def commutes_like_generators(images: Mapping[tuple[int, int], TorusElement], cartan: CartanData) -> bool:
    """Whether the images satisfy the same t-commutation as the seed generators."""
    keys = [(a, lv) for lv in (0, 1) for a in range(1, cartan.rank + 1)]
    get = {k: images.get(k, TorusElement.generator(cartan, *k)) for k in keys}
    for (a, n) in keys:
        for (b, m) in keys:
            lhs = product(get[(a, n)], get[(b, m)])
            rhs = product(get[(b, m)], get[(a, n)]).shift_t(2 * cartan.lam[a - 1][b - 1] * (m - n))
            if lhs != rhs:
                return False
    return True


# rendering ----------------------------------------------------------------------

def _render_t_power(doubled: int) -> str:
    if doubled % 2:
        return f"t^{{{doubled}/2}}"
    e = doubled // 2
    return "t" if e == 1 else f"t^{{{e}}}"


def render(x: TorusElement) -> str:
    """Normal-ordered text such as ``t^{-1}*Q[1,0]^-1*Q[1,1]^2``."""
    if not x._terms:
        return "0"
    r = x.rank
    pieces = []
    for key in sorted(x._terms, reverse=True):
        coeff = x._terms[key]
        gens = []
        for idx, n in enumerate(key):
            if n:
                level, alpha = divmod(idx, r)
                g = f"Q[{alpha + 1},{level}]"
                gens.append(g if n == 1 else f"{g}^{n}")
        sign = 1
        factors = []
        if len(coeff) == 1:
            (e, c), = coeff.items()
            sign = -1 if c < 0 else 1
            if abs(c) != 1:
                factors.append(str(abs(c)))
            if e:
                factors.append(_render_t_power(e))
        else:
            factors.append(f"({TPoly(coeff)})")
        body = "*".join(factors + gens) or "1"
        if not pieces:
            pieces.append(("-" if sign < 0 else "") + body)
        else:
            pieces.append((" - " if sign < 0 else " + ") + body)
    return "".join(pieces)
